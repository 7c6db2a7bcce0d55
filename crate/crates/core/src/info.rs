//! Classical information-theory helpers: entropies, mutual information of a
//! discrete memoryless channel, Blahut–Arimoto and golden-section search.

use crate::error::{Error, Result};

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| plogp(p)).sum::<f64>()
}

/// `H(p) = −p log2 p − (1−p) log2 (1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    -(plogp(p) + plogp(1.0 - p))
}

/// `I(X;Y) = H(Y) − Σ_x p(x) H(Y|X=x)` for channel rows `W[x][y] = P(y|x)`.
pub fn mutual_information<R: AsRef<[f64]>>(prior: &[f64], rows: &[R]) -> f64 {
    assert_eq!(prior.len(), rows.len());
    let ny = rows[0].as_ref().len();
    let mut out = vec![0.0; ny];
    let mut cond = 0.0;
    for (&px, row) in prior.iter().zip(rows) {
        let row = row.as_ref();
        for (o, &w) in out.iter_mut().zip(row) {
            *o += px * w;
        }
        if px > 0.0 {
            cond += px * shannon_entropy(row);
        }
    }
    (shannon_entropy(&out) - cond).max(0.0)
}

/// Maximizes a unimodal function on `[lo, hi]` until the bracket is narrower than `width`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, width: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if b - a <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the interior probes can beat the midpoint by a rounding hair; keep the best
    [(x, fx), (c, fc), (d, fd)].into_iter().fold(
        (x, fx),
        |best, cand| if cand.1 > best.1 { cand } else { best },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlahutArimoto {
    /// Capacity in bits (lower bound at termination).
    pub capacity: f64,
    /// Capacity-achieving input distribution.
    pub prior: Vec<f64>,
    /// Gap between the upper and lower capacity bounds at termination.
    pub gap: f64,
    pub iterations: usize,
}

/// Capacity of a discrete memoryless channel by Blahut–Arimoto iteration.
///
/// Stops when the upper bound `max_x D(W_x‖q)` and the lower bound
/// `log2 Σ_x p_x 2^{D(W_x‖q)}` differ by less than `tol`.
pub fn blahut_arimoto<R: AsRef<[f64]>>(
    rows: &[R],
    tol: f64,
    max_iterations: usize,
) -> Result<BlahutArimoto> {
    let nx = rows.len();
    if nx == 0 {
        return Err(Error::Contract("channel has no inputs".into()));
    }
    let ny = rows[0].as_ref().len();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut d = vec![0.0; nx];
    let mut q = vec![0.0; ny];
    for it in 1..=max_iterations {
        q.iter_mut().for_each(|x| *x = 0.0);
        for (px, row) in p.iter().zip(rows) {
            for (qy, &w) in q.iter_mut().zip(row.as_ref()) {
                *qy += px * w;
            }
        }
        for (dx, row) in d.iter_mut().zip(rows) {
            *dx = row
                .as_ref()
                .iter()
                .zip(&q)
                .filter(|(&w, _)| w > 0.0)
                .map(|(&w, &qy)| w * (w / qy).log2())
                .sum();
        }
        let dmax = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = p
            .iter()
            .zip(&d)
            .map(|(px, dx)| px * (dx - dmax).exp2())
            .sum();
        let lower = dmax + z.log2();
        let gap = dmax - lower;
        if gap < tol {
            return Ok(BlahutArimoto {
                capacity: lower.max(0.0),
                prior: p,
                gap,
                iterations: it,
            });
        }
        for (px, dx) in p.iter_mut().zip(&d) {
            *px *= (dx - dmax).exp2() / z;
        }
    }
    Err(Error::Numeric(format!(
        "Blahut-Arimoto did not converge in {max_iterations} iterations"
    )))
}
