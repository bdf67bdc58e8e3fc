use approx::assert_abs_diff_eq;

use rwre_core::drift::{drift_closed_iid, movavg_p_cutoff};
use rwre_core::sweep::{
    fig2, fig3, fig4, fig5, fig6, fig7, figure, figure_alphas, linspace, sweep_spec,
};
use rwre_core::{Model, SweepTable};

fn num(table: &SweepTable, row: usize, col: &str) -> f64 {
    table.rows[row][table
        .column(col)
        .unwrap_or_else(|| panic!("no column {col}"))]
    .as_f64()
    .unwrap()
}

fn text<'a>(table: &'a SweepTable, row: usize, col: &str) -> &'a str {
    table.rows[row][table.column(col).unwrap()]
        .as_str()
        .unwrap()
}

#[test]
fn csv_output_is_deterministic() {
    for name in ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"] {
        let a = figure(name, 16).unwrap().to_csv_string().unwrap();
        let b = figure(name, 16).unwrap().to_csv_string().unwrap();
        assert_eq!(a, b, "{name}");
        assert!(a.lines().count() > 2, "{name}");
    }
}

#[test]
fn numbers_round_trip_through_csv() {
    let table = fig3(10).unwrap();
    let csv = table.to_csv_string().unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    for (record, row) in reader.records().zip(&table.rows) {
        for (field, cell) in record.unwrap().iter().zip(row) {
            assert_eq!(field.parse::<f64>().unwrap(), cell.as_f64().unwrap());
        }
    }
}

#[test]
fn fig2_regimes_partition_the_square() {
    let table = fig2(40).unwrap();
    for row in 0..table.rows.len() {
        let (alpha, p) = (num(&table, row, "alpha"), num(&table, row, "p"));
        let code = text(&table, row, "regime");
        let on_line = alpha == 0.5 || p == 0.5;
        assert_eq!(code == "3", on_line, "alpha {alpha}, p {p}: {code}");
        if on_line || !(0.0 < alpha && alpha < 1.0 && 0.0 < p && p < 1.0) {
            continue;
        }
        let expected = if (alpha > 0.5) == (p > 0.5) {
            ["1a", "2a"]
        } else {
            ["1b", "2b"]
        };
        assert!(expected.contains(&code), "alpha {alpha}, p {p}: {code}");
        let drift = num(&table, row, "drift");
        assert_abs_diff_eq!(drift, drift_closed_iid(alpha, p).unwrap(), epsilon = 1e-12);
    }
}

#[test]
fn fig3_rho_zero_is_iid_and_infeasible_pairs_are_absent() {
    let table = fig3(20).unwrap();
    for a in figure_alphas() {
        let col = format!("drift_rho0_alpha{a}");
        for row in 0..table.rows.len() {
            let p = num(&table, row, "p");
            let drift = num(&table, row, &col);
            assert_abs_diff_eq!(drift, drift_closed_iid(a, p).unwrap(), epsilon = 1e-12);
            if a == 1.0 && p < 1.0 {
                assert_abs_diff_eq!(drift, 2.0 * p - 1.0, epsilon = 1e-12);
            }
        }
    }
    assert!(table.column("drift_rho-0.3_alpha0.75").is_some());
    assert!(table.column("drift_rho-0.3_alpha0.8").is_none());
}

#[test]
fn fig4_rows_are_feasible_and_long_format() {
    let table = fig4(20).unwrap();
    assert_eq!(
        table.columns,
        ["rho", "p", "alpha", "drift", "regime", "p_cutoff"]
    );
    for row in 0..table.rows.len() {
        let rho = num(&table, row, "rho");
        assert!(rho > -1.0 && rho < 1.0);
        let drift = num(&table, row, "drift");
        assert!(drift.abs() <= 2.0 * num(&table, row, "p") - 1.0 + 1e-12);
    }
}

#[test]
fn fig5_columns_and_endpoints() {
    let table = fig5(20).unwrap();
    assert_eq!(&table.columns[..3], ["p", "markov", "iid"]);
    assert_eq!(table.columns.last().unwrap(), "maximal");
    let last = table.rows.len() - 1;
    for col in &table.columns[1..] {
        assert_eq!(num(&table, 0, col), 0.0, "{col} at p = 1/2");
        assert!(num(&table, last, col).abs() < 1e-12, "{col} at p = 1");
    }
}

#[test]
fn fig6_cutoffs() {
    let table = fig6(30).unwrap();
    assert_eq!(table.columns, ["alpha", "p_cutoff_movavg", "p_cutoff_iid"]);
    for row in 0..table.rows.len() {
        let alpha = num(&table, row, "alpha");
        assert_eq!(num(&table, row, "p_cutoff_iid"), alpha);
        let movavg = num(&table, row, "p_cutoff_movavg");
        if alpha > 0.5 {
            assert!(movavg > 0.5 && movavg < alpha, "alpha {alpha}: {movavg}");
            assert_abs_diff_eq!(movavg, movavg_p_cutoff(alpha).unwrap(), epsilon = 1e-12);
        } else if alpha < 0.5 {
            assert!(movavg < 0.5 && movavg > alpha, "alpha {alpha}: {movavg}");
        } else {
            assert_eq!(movavg, 0.5);
        }
    }
}

#[test]
fn fig7_cutoff_below_alpha_and_larger_peak_for_strong_bias() {
    let table = fig7(400).unwrap();
    for a in figure_alphas().into_iter().filter(|&a| a < 1.0) {
        let movavg = format!("movavg_alpha{a}");
        let iid = format!("iid_alpha{a}");
        let first_zero = (0..table.rows.len())
            .find(|&r| num(&table, r, "p") > 0.5 && num(&table, r, &movavg) == 0.0)
            .map(|r| num(&table, r, "p"))
            .unwrap();
        assert!(first_zero < a, "alpha {a}: {first_zero}");
        let peak = |col: &str| {
            (0..table.rows.len())
                .map(|r| num(&table, r, col))
                .fold(0.0, f64::max)
        };
        if a >= 0.8 {
            assert!(peak(&movavg) > peak(&iid), "alpha {a}");
        }
    }
}

#[test]
fn moving_average_peak_falls_short_of_iid_for_mild_bias() {
    let table = fig7(400).unwrap();
    let peak = |col: &str| {
        (0..table.rows.len())
            .map(|r| num(&table, r, col))
            .fold(0.0, f64::max)
    };
    for a in [0.6, 0.65, 0.7] {
        assert!(
            peak(&format!("movavg_alpha{a}")) < peak(&format!("iid_alpha{a}")),
            "alpha {a}"
        );
    }
}

#[test]
fn custom_sweep() {
    let spec = Model::Iid { alpha: 0.8 }.spec().unwrap();
    let table = sweep_spec(&spec, 0.55, 0.95, 8).unwrap();
    assert_eq!(table.rows.len(), 9);
    let ps = linspace(0.55, 0.95, 8);
    for (row, &p) in ps.iter().enumerate() {
        assert_abs_diff_eq!(
            num(&table, row, "drift"),
            drift_closed_iid(0.8, p).unwrap(),
            epsilon = 1e-12
        );
    }
    assert!(figure("fig1", 10).is_err());
    assert!(fig2(0).is_err());
}
