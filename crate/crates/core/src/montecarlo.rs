//! Seeded, thread-count-independent Monte Carlo estimation.
//!
//! Trials are grouped into fixed-size chunks. Each chunk runs sequentially with
//! Welford accumulation; chunk results are merged in chunk order, so the
//! estimate is bit-identical for any degree of parallelism.

use rayon::prelude::*;
use serde::Serialize;

use crate::qstate::ComplexMatrix;
use crate::rng::{substream, StreamRng, Trial};
use crate::scalar::{czero, Real, C};

const CHUNK: u64 = 1024;

/// Sample mean with componentwise standard errors.
///
/// `std_error[k].re` and `std_error[k].im` are the standard errors of the real
/// and imaginary parts of `mean[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate<T: Real> {
    pub mean: Vec<C<T>>,
    pub std_error: Vec<C<T>>,
    pub n_samples: usize,
}

impl<T: Real> McEstimate<T> {
    /// Real part of the first component and its standard error.
    pub fn scalar(&self) -> (T, T) {
        (self.mean[0].re, self.std_error[0].re)
    }

    /// Reshapes a square number of components into a matrix.
    pub fn mean_matrix(&self, n: usize) -> ComplexMatrix<T> {
        ComplexMatrix::new(n, n, self.mean.clone()).expect("component count is n*n")
    }

    pub fn std_error_matrix(&self, n: usize) -> ComplexMatrix<T> {
        ComplexMatrix::new(n, n, self.std_error.clone()).expect("component count is n*n")
    }

    /// Compares the estimate with exact values component by component.
    pub fn deviation_from(&self, expected: &[C<T>]) -> DeviationReport {
        assert_eq!(expected.len(), self.mean.len(), "component count mismatch");
        let mut report = DeviationReport {
            max_se_deviation: 0.0,
            max_abs_deviation: 0.0,
            worst_component: 0,
            components: expected.len(),
            n_samples: self.n_samples,
        };
        for (k, ((m, se), e)) in self.mean.iter().zip(&self.std_error).zip(expected).enumerate() {
            for (got, want, err) in [(m.re, e.re, se.re), (m.im, e.im, se.im)] {
                let diff = (got - want).abs().as_f64();
                let z = se_units(diff, err.as_f64());
                report.max_abs_deviation = report.max_abs_deviation.max(diff);
                if z > report.max_se_deviation {
                    report.max_se_deviation = z;
                    report.worst_component = k;
                }
            }
        }
        report
    }
}

// Zero-variance components (exactly determined integrands) must match to rounding.
fn se_units(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Outcome of comparing a Monte Carlo estimate with closed-form values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationReport {
    /// Largest `|estimate - exact| / standard error` over real and imaginary parts.
    pub max_se_deviation: f64,
    pub max_abs_deviation: f64,
    pub worst_component: usize,
    pub components: usize,
    pub n_samples: usize,
}

impl DeviationReport {
    pub fn within(&self, se_units: f64) -> bool {
        self.max_se_deviation <= se_units
    }
}

#[derive(Clone)]
struct Welford<T: Real> {
    count: T,
    mean: Vec<C<T>>,
    m2: Vec<C<T>>,
}

impl<T: Real> Welford<T> {
    fn new(width: usize) -> Self {
        Self { count: T::zero(), mean: vec![czero(); width], m2: vec![czero(); width] }
    }

    fn push(&mut self, x: &[C<T>]) {
        self.count += T::one();
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            m.re += d.re / self.count;
            m.im += d.im / self.count;
            s.re += d.re * (v.re - m.re);
            s.im += d.im * (v.im - m.im);
        }
    }

    fn merge(&mut self, other: &Self) {
        if other.count == T::zero() {
            return;
        }
        let total = self.count + other.count;
        let wa = self.count / total;
        let wb = other.count / total;
        let cross = self.count * other.count / total;
        for k in 0..self.mean.len() {
            let d = other.mean[k] - self.mean[k];
            self.mean[k] =
                C::new(self.mean[k].re * wa + other.mean[k].re * wb, self.mean[k].im * wa + other.mean[k].im * wb);
            self.m2[k].re += other.m2[k].re + d.re * d.re * cross;
            self.m2[k].im += other.m2[k].im + d.im * d.im * cross;
        }
        self.count = total;
    }
}

/// Mean of a `width`-component integrand over `n_samples` seeded trials.
///
/// `f` fills the buffer with the integrand value for one trial, drawing from
/// that trial's own substream.
pub fn mc_mean<T, F>(n_samples: usize, seed: u64, width: usize, f: F) -> McEstimate<T>
where
    T: Real,
    F: Fn(Trial, &mut StreamRng, &mut [C<T>]) + Sync,
{
    let n = n_samples as u64;
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Welford<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Welford::new(width);
            let mut buf = vec![czero(); width];
            for idx in (c * CHUNK)..((c + 1) * CHUNK).min(n) {
                let trial = Trial::new(seed, idx);
                let mut rng = substream(seed, idx);
                buf.iter_mut().for_each(|b| *b = czero());
                f(trial, &mut rng, &mut buf);
                acc.push(&buf);
            }
            acc
        })
        .collect();
    let mut total = Welford::new(width);
    for p in &partial {
        total.merge(p);
    }
    let mut est = finish(total);
    est.n_samples = n_samples;
    est
}

/// Mean and standard errors of already-collected `width`-component values, accumulated in order.
pub fn sample_mean<'a, T, I>(width: usize, values: I) -> McEstimate<T>
where
    T: Real,
    I: IntoIterator<Item = &'a [C<T>]>,
{
    let mut acc = Welford::new(width);
    for v in values {
        assert_eq!(v.len(), width, "component count mismatch");
        acc.push(v);
    }
    finish(acc)
}

fn finish<T: Real>(total: Welford<T>) -> McEstimate<T> {
    let width = total.mean.len();
    let n_samples = total.count.to_usize().unwrap_or(0);
    let std_error = if n_samples >= 2 {
        let denom = total.count * (total.count - T::one());
        total
            .m2
            .iter()
            .map(|s| C::new((s.re.max(T::zero()) / denom).sqrt(), (s.im.max(T::zero()) / denom).sqrt()))
            .collect()
    } else {
        vec![C::new(T::infinity(), T::infinity()); width]
    };
    McEstimate { mean: total.mean, std_error, n_samples }
}

/// Runs `n` seeded trials in parallel and returns their results in trial order.
pub fn run_trials<S, E, F>(n: usize, seed: u64, f: F) -> Result<Vec<S>, E>
where
    S: Send,
    E: Send,
    F: Fn(Trial) -> Result<S, E> + Sync,
{
    (0..n as u64).into_par_iter().map(|i| f(Trial::new(seed, i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::uniform;
    use crate::scalar::cr;

    #[test]
    fn constant_integrand_is_exact() {
        let est = mc_mean::<f64, _>(5000, 3, 1, |_, _, b| b[0] = cr(1.0));
        assert_eq!(est.mean[0], cr(1.0));
        assert_eq!(est.std_error[0], czero());
        assert_eq!(est.deviation_from(&[cr(1.0)]).max_se_deviation, 0.0);
    }

    #[test]
    fn uniform_mean_and_error() {
        let est = mc_mean::<f64, _>(20_000, 9, 1, |_, rng, b| b[0] = cr(uniform(rng)));
        let (m, se) = est.scalar();
        // Var(U) = 1/12.
        assert!((se - (1.0 / 12.0 / 20_000.0f64).sqrt()).abs() < 1e-4);
        assert!((m - 0.5).abs() < 4.0 * se);
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let f = |_: Trial, rng: &mut StreamRng, b: &mut [C<f64>]| {
            b[0] = C::new(uniform(rng), uniform(rng));
        };
        let a = mc_mean(10_000, 1, 1, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc_mean(10_000, 1, 1, f));
        assert_eq!(a, b);
    }
}
