use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::{EnvError, EnvironmentSpec, MarkovParams, TwoDepParams};

fn check_open(name: &str, value: f64) -> Result<(), EnvError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(EnvError::OutOfRange {
            name: name.to_string(),
            value,
            range: "(0, 1)",
        })
    }
}

/// Iid environment with `P(U_i = 1) = alpha`.
pub fn build_iid(alpha: f64) -> Result<EnvironmentSpec, EnvError> {
    check_open("alpha", alpha)?;
    let p = DMatrix::from_row_slice(2, 2, &[1.0 - alpha, alpha, 1.0 - alpha, alpha]);
    EnvironmentSpec::new(p, vec![-1, 1], format!("iid(alpha={alpha})"))
}

pub fn build_markov(params: MarkovParams) -> EnvironmentSpec {
    let (a, b) = (params.a(), params.b());
    let p = DMatrix::from_row_slice(2, 2, &[1.0 - a, a, b, 1.0 - b]);
    EnvironmentSpec::new(p, vec![-1, 1], format!("markov(a={a}, b={b})"))
        .expect("open-interval Markov parameters give an irreducible chain")
}

/// Chain on `(U_{i-1}, U_i)` ordered `(-,-), (-,+), (+,-), (+,+)`.
pub fn build_two_dep(params: TwoDepParams) -> Result<EnvironmentSpec, EnvError> {
    let TwoDepParams {
        a_minus: am,
        a_plus: ap,
        b_minus: bm,
        b_plus: bp,
    } = params;
    #[rustfmt::skip]
    let p = DMatrix::from_row_slice(4, 4, &[
        1.0 - am, am,  0.0, 0.0,
        0.0,      0.0, bm,  1.0 - bm,
        1.0 - ap, ap,  0.0, 0.0,
        0.0,      0.0, bp,  1.0 - bp,
    ]);
    EnvironmentSpec::new(
        p,
        vec![-1, 1, -1, 1],
        format!("twodep(a-={am}, a+={ap}, b-={bm}, b+={bp})"),
    )
}

/// Transition table of a k-dependent environment, keyed by the `k - 1`
/// history preceding `u_{i-1}` (oldest first). Each entry is `(a_h, b_h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KDepTable {
    pub k: usize,
    pub entries: BTreeMap<Vec<i8>, (f64, f64)>,
}

impl KDepTable {
    /// Parses keys written as strings of `+` and `-` (U+2212 also accepted).
    pub fn from_strings<'a, I>(k: usize, entries: I) -> Result<Self, EnvError>
    where
        I: IntoIterator<Item = (&'a str, (f64, f64))>,
    {
        let mut map = BTreeMap::new();
        for (key, pair) in entries {
            let history = parse_history(key)?;
            if map.insert(history, pair).is_some() {
                return Err(EnvError::KDepTable(format!("duplicate history `{key}`")));
            }
        }
        Ok(Self { k, entries: map })
    }

    /// Reads `{ "k": 2, "table": { "-": [a, b], "+": [a, b] } }`.
    pub fn from_json_str(text: &str) -> Result<Self, EnvError> {
        #[derive(serde::Deserialize)]
        struct KDepFile {
            k: usize,
            table: BTreeMap<String, (f64, f64)>,
        }
        let file: KDepFile =
            serde_json::from_str(text).map_err(|e| EnvError::Json(e.to_string()))?;
        Self::from_strings(file.k, file.table.iter().map(|(h, &ab)| (h.as_str(), ab)))
    }

    /// Same `(a, b)` for every history.
    pub fn uniform(k: usize, a: f64, b: f64) -> Self {
        let entries = all_tuples(k.saturating_sub(1))
            .into_iter()
            .map(|h| (h, (a, b)))
            .collect();
        Self { k, entries }
    }
}

pub fn parse_history(key: &str) -> Result<Vec<i8>, EnvError> {
    key.chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' | '\u{2212}' => Ok(-1),
            other => Err(EnvError::KDepTable(format!(
                "history `{key}` contains `{other}`; use `+` and `-`"
            ))),
        })
        .collect()
}

fn history_string(h: &[i8]) -> String {
    h.iter().map(|&u| if u > 0 { '+' } else { '-' }).collect()
}

/// All `{-1,+1}^len` tuples in lexicographic order.
fn all_tuples(len: usize) -> Vec<Vec<i8>> {
    (0..1usize << len)
        .map(|code| {
            (0..len)
                .map(|j| {
                    if code >> (len - 1 - j) & 1 == 1 {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect()
}

/// Chain on k-tuples `(u_{i-k+1}, ..., u_i)`. From state
/// `(u_{i-k}, ..., u_{i-1})` with history `h = (u_{i-k}, ..., u_{i-2})` the
/// next site is `+1` with probability `a_h` when `u_{i-1} = -1`, and `-1` with
/// probability `b_h` when `u_{i-1} = +1`.
pub fn build_k_dep(table: &KDepTable) -> Result<EnvironmentSpec, EnvError> {
    let k = table.k;
    if k == 0 {
        return Err(EnvError::KDepTable("k must be at least 1".into()));
    }
    if k > 16 {
        return Err(EnvError::KDepTable(format!(
            "k = {k} is too large (max 16)"
        )));
    }
    for h in table.entries.keys() {
        if h.len() != k - 1 {
            return Err(EnvError::KDepTable(format!(
                "history `{}` has length {}, expected {}",
                history_string(h),
                h.len(),
                k - 1
            )));
        }
    }
    let m = 1usize << k;
    let mask = m - 1;
    let mut p = DMatrix::<f64>::zeros(m, m);
    for state in 0..m {
        // Oldest component is the most significant bit.
        let history: Vec<i8> = (0..k - 1)
            .map(|j| if state >> (k - 1 - j) & 1 == 1 { 1 } else { -1 })
            .collect();
        let &(a, b) = table.entries.get(&history).ok_or_else(|| {
            EnvError::KDepTable(format!("missing history `{}`", history_string(&history)))
        })?;
        let key = history_string(&history);
        check_open(&format!("a[{key}]"), a)?;
        check_open(&format!("b[{key}]"), b)?;
        let last_plus = state & 1 == 1;
        let to_minus = (state << 1) & mask;
        let to_plus = to_minus | 1;
        let (prob_minus, prob_plus) = if last_plus {
            (b, 1.0 - b)
        } else {
            (1.0 - a, a)
        };
        p[(state, to_minus)] = prob_minus;
        p[(state, to_plus)] = prob_plus;
    }
    let signs = (0..m).map(|s| if s & 1 == 1 { 1 } else { -1 }).collect();
    EnvironmentSpec::new(p, signs, format!("kdep(k={k})"))
}

/// Majority-of-three moving average of an iid `±1` sequence with
/// `P(+1) = alpha`. States are `(û_i, û_{i+1}, û_{i+2})` in lexicographic order.
pub fn build_moving_average(alpha: f64) -> Result<EnvironmentSpec, EnvError> {
    check_open("alpha", alpha)?;
    let mut p = DMatrix::<f64>::zeros(8, 8);
    for state in 0..8 {
        let shifted = (state << 1) & 7;
        p[(state, shifted)] = 1.0 - alpha;
        p[(state, shifted | 1)] = alpha;
    }
    let signs = (0..8u32)
        .map(|s| if s.count_ones() >= 2 { 1 } else { -1 })
        .collect();
    EnvironmentSpec::new(p, signs, format!("movavg(alpha={alpha})"))
}
