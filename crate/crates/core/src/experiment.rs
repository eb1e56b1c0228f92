//! Experiments as transformation-valued measures.
//!
//! A [`DiscreteExperiment`] assigns a completely positive map to each atom of
//! a finite outcome set; events are subsets of labels and coarse-grainings are
//! partitions. A [`ContinuousExperiment`] instead supplies a rank-one
//! transformation density over an outcome manifold together with a sampler
//! for its uniform base measure.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::cpmap::{check_trace_condition, random_channel, KrausSet, Operation, QuantumMap};
use crate::error::{Error, Result};
use crate::montecarlo::{mc_mean, run_trials, McEstimate};
use crate::qstate::{eig_hermitian, random_density, tol, DensityMatrix, HermitianOperator, PureState};
use crate::rng::{substream, uniform, Trial};
use crate::scalar::{cr, Real};

/// One simulated trial: the outcome, the normalised post-measurement state,
/// and the probability (discrete) or probability density (continuous) of the outcome.
#[derive(Debug, Clone)]
pub struct OutcomeSample<T: Real, O> {
    pub outcome: O,
    pub post_state: DensityMatrix<T>,
    pub probability_density: T,
    pub trial_index: u64,
    pub seed: u64,
}

/// Finite-outcome experiment: one operation per outcome label.
#[derive(Debug, Clone)]
pub struct DiscreteExperiment<T: Real> {
    labels: Vec<String>,
    transforms: Vec<Operation<T>>,
    dim: usize,
}

impl<T: Real> DiscreteExperiment<T> {
    /// Builds an experiment. No trace conditions are enforced here; see [`validate`](Self::validate).
    pub fn new(labels: Vec<String>, transforms: Vec<Operation<T>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("experiment needs at least one outcome".into()));
        }
        if labels.len() != transforms.len() {
            return Err(Error::InvalidArgument(format!("{} labels but {} transforms", labels.len(), transforms.len())));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let dim = transforms[0].dim();
        for t in &transforms {
            if t.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, found: t.dim() });
            }
        }
        Ok(Self { labels, transforms, dim })
    }

    /// Lüders measurement with one projector (or any Kraus operator) per outcome, labelled `0, 1, ...`.
    pub fn from_kraus_operators(ops: Vec<crate::qstate::ComplexMatrix<T>>) -> Result<Self> {
        let labels = (0..ops.len()).map(|i| i.to_string()).collect();
        let transforms =
            ops.into_iter().map(|k| KrausSet::new(vec![k]).map(Operation::Kraus)).collect::<Result<_>>()?;
        Self::new(labels, transforms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn transforms(&self) -> &[Operation<T>] {
        &self.transforms
    }

    fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn check_state(&self, w: &DensityMatrix<T>) -> Result<()> {
        if w.dim() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: w.dim() });
        }
        Ok(())
    }

    /// `tr(T(i) w)` for each outcome, in label order.
    pub fn outcome_probabilities(&self, w: &DensityMatrix<T>) -> Result<Vec<T>> {
        self.check_state(w)?;
        self.transforms.iter().map(|t| Ok(t.apply_matrix(w.matrix())?.trace().re)).collect()
    }

    /// Probability that the outcome lies in `subset` (a set of labels; repeats ignored).
    pub fn outcome_probability(&self, w: &DensityMatrix<T>, subset: &[&str]) -> Result<T> {
        let mut idx = subset.iter().map(|l| self.index_of(l)).collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        let probs = self.outcome_probabilities(w)?;
        Ok(idx.iter().map(|&i| probs[i]).sum())
    }

    /// Normalised state after observing `label`.
    pub fn posterior_state(&self, w: &DensityMatrix<T>, label: &str) -> Result<DensityMatrix<T>> {
        self.check_state(w)?;
        let i = self.index_of(label)?;
        let out = HermitianOperator::symmetrized(&self.transforms[i].apply_matrix(w.matrix())?);
        let p = out.trace();
        if p.is_nan() || p <= T::of(tol::PROB) {
            return Err(Error::ZeroProbabilityOutcome { label: label.to_string(), probability: p.as_f64() });
        }
        Ok(DensityMatrix::from_hermitian_unchecked(out.scale(T::one() / p)))
    }

    /// Merges outcomes along `partition`; each block's map is the sum of its members' maps.
    /// Block labels join member labels with `+`.
    pub fn coarse_grain(&self, partition: &[Vec<String>]) -> Result<Self> {
        let mut covered = vec![false; self.labels.len()];
        let mut labels = Vec::with_capacity(partition.len());
        let mut transforms = Vec::with_capacity(partition.len());
        for block in partition {
            if block.is_empty() {
                return Err(Error::BadPartition("empty block".into()));
            }
            let mut acc: Option<Operation<T>> = None;
            for l in block {
                let i = self.index_of(l).map_err(|_| Error::BadPartition(format!("unknown label `{l}`")))?;
                if covered[i] {
                    return Err(Error::BadPartition(format!("label `{l}` appears twice")));
                }
                covered[i] = true;
                acc = Some(match acc {
                    None => self.transforms[i].clone(),
                    Some(a) => a.sum(&self.transforms[i])?,
                });
            }
            labels.push(block.join("+"));
            transforms.push(acc.expect("nonempty block"));
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::BadPartition(format!("label `{}` not covered", self.labels[i])));
        }
        Self::new(labels, transforms)
    }

    /// Draws an outcome by inverse CDF over the outcome probabilities.
    pub fn sample(&self, w: &DensityMatrix<T>, trial: Trial) -> Result<OutcomeSample<T, String>> {
        let mut rng = trial.rng();
        let (i, p) = self.draw_index(w, &mut rng)?;
        let label = self.labels[i].clone();
        let post_state = self.posterior_state(w, &label)?;
        Ok(OutcomeSample {
            outcome: label,
            post_state,
            probability_density: p,
            trial_index: trial.index,
            seed: trial.seed,
        })
    }

    fn draw_index<R: Rng + ?Sized>(&self, w: &DensityMatrix<T>, rng: &mut R) -> Result<(usize, T)> {
        let probs = self.outcome_probabilities(w)?;
        let total: T = probs.iter().copied().map(|p| p.max(T::zero())).sum();
        if total.is_nan() || total <= T::zero() {
            return Err(Error::InvalidArgument("experiment has zero total probability".into()));
        }
        let target = uniform::<T, R>(rng) * total;
        let mut cum = T::zero();
        let mut last = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p <= T::of(tol::PROB) {
                continue;
            }
            last = i;
            cum += p;
            if target < cum {
                return Ok((i, p));
            }
        }
        Ok((last, probs[last]))
    }

    /// `n` independent seeded samples, in trial order.
    pub fn sample_many(&self, w: &DensityMatrix<T>, n: usize, seed: u64) -> Result<Vec<OutcomeSample<T, String>>> {
        run_trials(n, seed, |t| self.sample(w, t))
    }

    /// Checks complete positivity of every transform (Choi spectrum), the
    /// trace-reducing property per transform, and total probability one,
    /// the latter two on `probe_states` random density matrices.
    pub fn validate(&self, probe_states: usize, seed: u64) -> Result<ValidationReport> {
        let mut violations = Vec::new();
        let t = T::of(tol::PSD);
        for (label, tr) in self.labels.iter().zip(&self.transforms) {
            let min = tr.to_choi().min_eigenvalue()?;
            if min < -t {
                violations
                    .push(Violation::NotCompletelyPositive { label: label.clone(), min_choi_eigenvalue: min.as_f64() });
            }
        }
        let mut rng = substream(seed, 0);
        let mut worst_reduce = vec![T::zero(); self.labels.len()];
        let mut worst_total = T::one();
        for k in 0..probe_states.max(1) {
            let rank = 1 + k % self.dim;
            let w: DensityMatrix<T> = random_density(self.dim, rank, &mut rng)?;
            let probs = self.outcome_probabilities(&w)?;
            for (wr, &p) in worst_reduce.iter_mut().zip(&probs) {
                *wr = wr.max(p);
            }
            let total: T = probs.iter().copied().sum();
            if (total - T::one()).abs() > (worst_total - T::one()).abs() {
                worst_total = total;
            }
        }
        for (label, &r) in self.labels.iter().zip(&worst_reduce) {
            if r > T::one() + t {
                violations.push(Violation::NotTraceReducing { label: label.clone(), ratio: r.as_f64() });
            }
        }
        if (worst_total - T::one()).abs() > t {
            violations.push(Violation::TotalProbability { ratio: worst_total.as_f64() });
        }
        Ok(ValidationReport { outcomes: self.labels.len(), probe_states: probe_states.max(1), violations })
    }
}

/// Result partition block containing `label`, i.e. the observed result of the coarse-grained experiment.
pub fn block_of(partition: &[Vec<String>], label: &str) -> Option<usize> {
    partition.iter().position(|b| b.iter().any(|l| l == label))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotCompletelyPositive { label: String, min_choi_eigenvalue: f64 },
    NotTraceReducing { label: String, ratio: f64 },
    TotalProbability { ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub outcomes: usize,
    pub probe_states: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Random valid experiment: a random trace-preserving channel whose Kraus
/// operators are dealt out `kraus_per_outcome` at a time to `outcomes` labels.
pub fn random_experiment<T: Real, R: Rng + ?Sized>(
    n: usize,
    outcomes: usize,
    kraus_per_outcome: usize,
    rng: &mut R,
) -> Result<DiscreteExperiment<T>> {
    if outcomes == 0 || kraus_per_outcome == 0 {
        return Err(Error::InvalidArgument("need at least one outcome and one Kraus operator".into()));
    }
    let channel: KrausSet<T> = random_channel(n, outcomes * kraus_per_outcome, rng)?;
    debug_assert!(check_trace_condition(&channel)?.is_trace_preserving);
    let transforms = channel
        .operators()
        .chunks(kraus_per_outcome)
        .map(|ops| KrausSet::new(ops.to_vec()).map(Operation::Kraus))
        .collect::<Result<Vec<_>>>()?;
    DiscreteExperiment::new((0..outcomes).map(|i| format!("o{i}")).collect(), transforms)
}

/// Outcome manifold of a continuous experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeSpace {
    /// Pure states of an `n`-dimensional system.
    ProjectiveSpace { n: usize },
    /// Products of pure states of the listed factor dimensions.
    Segre { dims: Vec<usize> },
    /// Degree-`d` coherent states of an `n`-dimensional base space.
    Veronese { n: usize, d: usize },
}

/// Experiment whose outcome `ω` has a rank-one transformation density
/// `t(ω) = c·|ξ(ω)⟩⟨ξ(ω)| · |ξ(ω)⟩⟨ξ(ω)|` relative to a uniform base probability
/// measure μ, with `c ∫ |ξ⟩⟨ξ| dμ = I`.
pub trait ContinuousExperiment<T: Real>: Sync {
    type Point: Clone + Send;

    fn outcome_space(&self) -> OutcomeSpace;

    /// Dimension of the measured system.
    fn system_dim(&self) -> usize;

    /// The constant `c` making total probability one.
    fn normalization(&self) -> T;

    /// Draws from the base measure μ.
    fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;

    /// Unit vector `ξ(ω)` in the system space.
    fn embed(&self, point: &Self::Point) -> PureState<T>;

    /// Single Kraus operator `√c·|ξ⟩⟨ξ|`.
    fn transformation_density(&self, point: &Self::Point) -> KrausSet<T> {
        KrausSet::rank_one(self.embed(point).vector(), self.normalization().sqrt())
    }

    /// Density of the outcome relative to μ: `c·⟨ξ|w|ξ⟩`.
    fn probability_density(&self, w: &DensityMatrix<T>, point: &Self::Point) -> Result<T> {
        check_system(self.system_dim(), w)?;
        Ok(self.normalization() * w.expectation(self.embed(point).vector())?)
    }

    /// Normalised post-measurement state obtained by applying the transformation density.
    fn posterior_at(&self, w: &DensityMatrix<T>, point: &Self::Point) -> Result<DensityMatrix<T>> {
        check_system(self.system_dim(), w)?;
        let out = HermitianOperator::symmetrized(&self.transformation_density(point).apply_matrix(w.matrix())?);
        DensityMatrix::normalized_unchecked(&out)
    }

    /// Rejection sampler for outcomes of `w`.
    fn sampler<'a>(&'a self, w: &'a DensityMatrix<T>) -> Result<RejectionSampler<'a, T, Self>>
    where
        Self: Sized,
    {
        RejectionSampler::new(self, w)
    }

    /// Monte Carlo estimate of `∫ 1{ω ∈ R} c⟨ξ|w|ξ⟩ μ(dω)` from base-measure proposals.
    fn region_probability<F>(
        &self,
        w: &DensityMatrix<T>,
        region: F,
        n_samples: usize,
        seed: u64,
    ) -> Result<McEstimate<T>>
    where
        F: Fn(&Self::Point) -> bool + Sync,
        Self: Sized,
    {
        check_system(self.system_dim(), w)?;
        let c = self.normalization();
        Ok(mc_mean(n_samples, seed, 1, |_, rng, out| {
            let p = self.sample_base(rng);
            if region(&p) {
                let v = w.expectation(self.embed(&p).vector()).expect("dimension checked");
                out[0] = cr(c * v);
            }
        }))
    }

    /// Total probability over the whole outcome space; should be one.
    fn total_probability(&self, w: &DensityMatrix<T>, n_samples: usize, seed: u64) -> Result<McEstimate<T>>
    where
        Self: Sized,
    {
        self.region_probability(w, |_| true, n_samples, seed)
    }
}

fn check_system<T: Real>(dim: usize, w: &DensityMatrix<T>) -> Result<()> {
    if w.dim() != dim {
        return Err(Error::DimMismatch { expected: dim, found: w.dim() });
    }
    Ok(())
}

/// Samples outcomes with density `c⟨ξ|w|ξ⟩` by rejection from the base measure.
///
/// The envelope is `c·λ_max(w)`; a proposal is accepted with probability
/// `⟨ξ|w|ξ⟩ / λ_max(w)`, so the mean acceptance rate is `1 / (c·λ_max)`.
/// Retries draw from the same trial stream.
pub struct RejectionSampler<'a, T: Real, E: ContinuousExperiment<T>> {
    experiment: &'a E,
    state: &'a DensityMatrix<T>,
    lambda_max: T,
}

impl<'a, T: Real, E: ContinuousExperiment<T>> RejectionSampler<'a, T, E> {
    pub fn new(experiment: &'a E, state: &'a DensityMatrix<T>) -> Result<Self> {
        check_system(experiment.system_dim(), state)?;
        let lambda_max = eig_hermitian(state.operator())?.max_eigenvalue();
        if lambda_max.is_nan() || lambda_max <= T::zero() {
            return Err(Error::NotPositive { min_eigenvalue: lambda_max.as_f64() });
        }
        Ok(Self { experiment, state, lambda_max })
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    pub fn expected_acceptance(&self) -> T {
        T::one() / (self.experiment.normalization() * self.lambda_max)
    }

    /// Accepted point, its embedded vector, and the outcome density there.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (E::Point, PureState<T>, T) {
        loop {
            let p = self.experiment.sample_base(rng);
            let xi = self.experiment.embed(&p);
            let q = self.state.expectation(xi.vector()).expect("dimension checked at construction");
            let u: T = uniform(rng);
            if u * self.lambda_max < q {
                return (p, xi, self.experiment.normalization() * q);
            }
        }
    }

    /// One trial; the post-state is the projector onto `ξ(ω)`.
    pub fn sample(&self, trial: Trial) -> OutcomeSample<T, E::Point> {
        let mut rng = trial.rng();
        let (outcome, xi, density) = self.draw(&mut rng);
        OutcomeSample {
            outcome,
            post_state: xi.projector(),
            probability_density: density,
            trial_index: trial.index,
            seed: trial.seed,
        }
    }

    /// `n` independent trials in trial order.
    pub fn sample_many(&self, n: usize, seed: u64) -> Vec<OutcomeSample<T, E::Point>>
    where
        T: Send,
        E: Sync,
    {
        run_trials::<_, std::convert::Infallible, _>(n, seed, |t| Ok(self.sample(t))).expect("infallible")
    }
}
