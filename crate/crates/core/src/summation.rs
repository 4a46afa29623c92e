//! Power-series evaluation with rational acceleration near and beyond the
//! convergence boundary.
//!
//! Inside the disk the partial sums are used directly with a geometric tail
//! estimate. Closer to the boundary the partial sums are passed through
//! Wynn's epsilon algorithm, whose even columns are the Padé approximants
//! on the staircase `[n+k/k]`; the accepted estimate is the one whose three
//! most recent approximants agree best.

/// Ratio `|z|/radius` up to which partial sums are trusted without acceleration.
pub const DIRECT_RATIO: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Accelerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    /// Partial sums inside `DIRECT_RATIO`, Wynn acceleration outside.
    Auto,
    /// Plain truncated partial sums everywhere.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Estimated absolute error of `value`.
    pub error: f64,
    pub method: Method,
}

/// Sum `sum_n coeffs[n] z^n` for a series whose convergence radius is about `radius`.
pub fn sum_power_series(coeffs: &[f64], z: f64, radius: f64, summation: Summation) -> SeriesValue {
    let ratio = if radius > 0.0 && radius.is_finite() {
        z.abs() / radius
    } else {
        f64::INFINITY
    };
    if coeffs.is_empty() {
        return SeriesValue {
            value: 0.0,
            error: 0.0,
            method: Method::Direct,
        };
    }
    if summation == Summation::Truncated || ratio <= DIRECT_RATIO {
        return direct_sum(coeffs, z, ratio);
    }
    let sums = partial_sums(coeffs, z);
    // Past the radius the late partial sums grow without bound and their
    // round-off swamps the extrapolation, so shorter prefixes compete too.
    let best = prefix_lengths(sums.len())
        .filter_map(|m| wynn_epsilon(&sums[..m]))
        .min_by(|a, b| a.error.total_cmp(&b.error));
    match best {
        Some(acc) => SeriesValue {
            value: acc.value,
            error: acc.error,
            method: Method::Accelerated,
        },
        None => SeriesValue {
            value: *sums.last().unwrap(),
            error: f64::INFINITY,
            method: Method::Accelerated,
        },
    }
}

fn prefix_lengths(n: usize) -> impl Iterator<Item = usize> {
    const LENGTHS: [usize; 7] = [24, 36, 50, 70, 100, 140, 200];
    LENGTHS
        .into_iter()
        .filter(move |&m| m < n)
        .chain(std::iter::once(n))
}

fn direct_sum(coeffs: &[f64], z: f64, ratio: f64) -> SeriesValue {
    // Horner from the top keeps round-off proportional to the largest term.
    let mut value = 0.0;
    let mut abs_sum = 0.0;
    let mut zn = 1.0;
    for &c in coeffs {
        abs_sum += (c * zn).abs();
        zn *= z;
    }
    for &c in coeffs.iter().rev() {
        value = value * z + c;
    }
    let last = (coeffs[coeffs.len() - 1] * z.powi(coeffs.len() as i32 - 1)).abs();
    let tail = if ratio < 1.0 {
        last * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    SeriesValue {
        value,
        error: tail + 2.0 * f64::EPSILON * abs_sum,
        method: Method::Direct,
    }
}

pub fn partial_sums(coeffs: &[f64], z: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(coeffs.len());
    let mut s = 0.0;
    let mut zn = 1.0;
    for &c in coeffs {
        s += c * zn;
        zn *= z;
        out.push(s);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accelerated {
    pub value: f64,
    pub error: f64,
    /// Even epsilon column the estimate came from (`2k` gives Padé denominators of degree `k`).
    pub column: usize,
}

/// Wynn's epsilon algorithm on a sequence of partial sums.
///
/// Each even column is scored by the spread of its last three entries, so an
/// estimate is only accepted when three consecutive approximant orders agree.
pub fn wynn_epsilon(sums: &[f64]) -> Option<Accelerated> {
    let n = sums.len();
    if n < 3 {
        return None;
    }
    let magnitude = sums.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let floor = 16.0 * f64::EPSILON * magnitude;

    let mut best: Option<Accelerated> = None;
    let mut consider = |col: &[f64], column: usize| {
        let m = col.len();
        if m < 3 {
            return;
        }
        let (a, b, c) = (col[m - 3], col[m - 2], col[m - 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return;
        }
        let error = (c - b).abs() + (b - a).abs() + floor;
        if best.is_none_or(|cur| error < cur.error) {
            best = Some(Accelerated {
                value: c,
                error,
                column,
            });
        }
    };

    let mut prev = vec![0.0; n + 1];
    let mut cur = sums.to_vec();
    let mut column = 0;
    loop {
        if column % 2 == 0 {
            consider(&cur, column);
        }
        if cur.len() < 2 {
            break;
        }
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == 0.0 {
                break;
            }
            let e = prev[j + 1] + 1.0 / diff;
            if !e.is_finite() {
                break;
            }
            next.push(e);
        }
        // A column that stops early cannot seed a consistent next column.
        if next.len() != cur.len() - 1 || next.is_empty() {
            break;
        }
        prev = cur;
        cur = next;
        column += 1;
    }
    best
}
