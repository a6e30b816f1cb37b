//! Binary-hypothesis signal model, the optimal bit detector, its exact error
//! probability, and a Monte-Carlo bit-error estimator.
//!
//! A backscatter device signals bit `i` by setting its reflection
//! coefficient to `γ_i`. While carrier emitter `t` probes with `Φ`, reader
//! `r` observes
//!
//! ```text
//! Y_{t,r} = G_{t,r}·Φ + γ_i·g_r·g_tᵀ·Φ + W_{t,r},   W entries iid CN(0, 1)
//! ```
//!
//! With perfect CSI the direct link `G_{t,r}·Φ` is known and subtracted;
//! writing `A_{t,r} = g_r·g_tᵀ·Φ`, the maximum-a-posteriori detector reduces
//! to a threshold test on the matched-filter statistic
//!
//! ```text
//! LLR′ = Σ_t Σ_{r≠t} Re{Tr{A_{t,r}·Y′_{t,r}ᴴ}}  ≷  η,
//! η    = (γ1+γ0)/2 · Σ‖A_{t,r}‖²   (+ ln(P0/P1)/(2(γ1−γ0)) for unequal priors)
//! ```
//!
//! Under hypothesis `i` the statistic is Gaussian with mean `γ_i·Σ‖A‖²` and
//! variance `Σ‖A‖²/2`, giving the exact equal-prior error probability
//! `Pe = Q((γ1−γ0)·√(Σ‖A‖²/2))`. For free-space LOS channels `Σ‖A‖²`
//! depends on geometry only: `Σ‖A‖² = p_t·τ_d·M·Σ 1/(d_r²·d_t²)`, the single
//! formula shared with the [`crate::metrics`] module (see
//! [`pe_from_metric`]).
//!
//! When several emitters transmit simultaneously they spread `Φ` with
//! orthogonal per-slot sequences; readers despread by correlating with each
//! emitter's known sequence, which restores the per-pair model above (the
//! sequences carry `η = 1/T`, keeping the total radiated energy per slot
//! equal to a single emitter's).

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::{
    make_orthogonal_sequences, synthesize_channels, ChannelRealization, OrthogonalSequenceSet,
    ProbingSignal,
};
use crate::geometry::{Deployment, Point};
use crate::seeding::derive_seed;
use crate::{Error, Result};

/// Tail probability of the standard normal distribution.
///
/// Evaluated as `0.5·erfc(x/√2)`; `libm`'s `erfc` is a port of the standard
/// Sun/musl implementation with worst-case error below 1 ulp, far inside the
/// 1e-12 absolute accuracy required here.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Closed-form error probability together with its Q-function argument.
#[derive(Debug, Clone, Copy)]
pub struct PeResult {
    pub pe: f64,
    pub argument: f64,
}

/// The one formula linking geometry metrics to error probability:
/// `Pe = Q((γ1−γ0)·√(½·p_tτ_d·M·metric))`, where `metric` is a sum of
/// `1/(d_r²·d_t²)` terms over the active emitter/reader pairs.
///
/// Both the detector's closed forms and the selection figures of merit
/// funnel through here so the two routes cannot drift apart.
pub fn pe_from_metric(
    gamma0: f64,
    gamma1: f64,
    transmit_snr: f64,
    antennas: usize,
    metric: f64,
) -> Result<PeResult> {
    if gamma1 < gamma0 {
        return Err(Error::InvalidArgument(format!(
            "gamma1 ({gamma1}) must not be below gamma0 ({gamma0})"
        )));
    }
    if transmit_snr.is_nan() || transmit_snr < 0.0 || metric.is_nan() || metric < 0.0 {
        return Err(Error::InvalidArgument(
            "transmit SNR and metric must be non-negative".into(),
        ));
    }
    let argument = (gamma1 - gamma0) * (0.5 * transmit_snr * antennas as f64 * metric).sqrt();
    Ok(PeResult {
        pe: q_function(argument),
        argument,
    })
}

/// Which APs read while a given emitter transmits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReaderPolicy {
    /// Every AP except the slot's emitter reads (rotating-emitter schedule:
    /// idle emitters read too).
    AllOthers,
    /// Only APs outside the emitter set read (simultaneous emitters with
    /// orthogonal sequences; the reader set is the same in every slot).
    Complement,
    /// A fixed reader list, identical for every slot. The list must not
    /// contain a slot's own emitter.
    Explicit(Vec<usize>),
}

/// Detector configuration: reflection coefficients, priors, the emitter set,
/// and the reader policy.
#[derive(Debug, Clone)]
pub struct DetectorConfig {
    gamma0: f64,
    gamma1: f64,
    prior0: f64,
    prior1: f64,
    ce_set: Vec<usize>,
    reader_policy: ReaderPolicy,
}

impl DetectorConfig {
    pub fn new(
        gamma0: f64,
        gamma1: f64,
        prior0: f64,
        prior1: f64,
        ce_set: Vec<usize>,
        reader_policy: ReaderPolicy,
    ) -> Result<Self> {
        if !gamma0.is_finite() || !gamma1.is_finite() || gamma1 <= gamma0 {
            return Err(Error::InvalidArgument(format!(
                "reflection coefficients need gamma1 > gamma0 (got {gamma0}, {gamma1})"
            )));
        }
        if !(0.0..=1.0).contains(&prior0)
            || !(0.0..=1.0).contains(&prior1)
            || (prior0 + prior1 - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidArgument(format!(
                "priors must be probabilities summing to 1 (got {prior0} + {prior1})"
            )));
        }
        if ce_set.is_empty() {
            return Err(Error::InvalidArgument("emitter set is empty".into()));
        }
        let mut sorted = ce_set.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ce_set.len() {
            return Err(Error::InvalidArgument(
                "emitter set contains duplicate indices".into(),
            ));
        }
        Ok(Self {
            gamma0,
            gamma1,
            prior0,
            prior1,
            ce_set,
            reader_policy,
        })
    }

    /// Equal-prior configuration, the default throughout.
    pub fn equal_priors(
        gamma0: f64,
        gamma1: f64,
        ce_set: Vec<usize>,
        reader_policy: ReaderPolicy,
    ) -> Result<Self> {
        Self::new(gamma0, gamma1, 0.5, 0.5, ce_set, reader_policy)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn ce_set(&self) -> &[usize] {
        &self.ce_set
    }

    pub fn reader_policy(&self) -> &ReaderPolicy {
        &self.reader_policy
    }

    /// Reflection coefficient selected by a bit.
    pub fn gamma_for(&self, bit: bool) -> f64 {
        if bit {
            self.gamma1
        } else {
            self.gamma0
        }
    }

    fn readers_for_slot(&self, k: usize, t: usize) -> Result<Vec<usize>> {
        let readers: Vec<usize> = match &self.reader_policy {
            ReaderPolicy::AllOthers => (0..k).filter(|r| *r != t).collect(),
            ReaderPolicy::Complement => (0..k).filter(|r| !self.ce_set.contains(r)).collect(),
            ReaderPolicy::Explicit(list) => {
                if list.contains(&t) {
                    return Err(Error::InvalidArgument(format!(
                        "reader list contains emitter {t} for its own slot"
                    )));
                }
                list.clone()
            }
        };
        if readers.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no readers available for emitter {t}"
            )));
        }
        Ok(readers)
    }

    /// Ordered `(t, r)` pairs processed by the detector: emitters in
    /// configuration order, readers ascending within each slot.
    pub fn pair_list(&self, k: usize) -> Result<Vec<(usize, usize)>> {
        for &t in &self.ce_set {
            if t >= k {
                return Err(Error::InvalidArgument(format!(
                    "emitter index {t} out of range for {k} APs"
                )));
            }
        }
        if let ReaderPolicy::Explicit(list) = &self.reader_policy {
            for &r in list {
                if r >= k {
                    return Err(Error::InvalidArgument(format!(
                        "reader index {r} out of range for {k} APs"
                    )));
                }
            }
        }
        let mut pairs = Vec::new();
        for &t in &self.ce_set {
            for r in self.readers_for_slot(k, t)? {
                pairs.push((t, r));
            }
        }
        Ok(pairs)
    }
}

/// Received blocks `Y_{t,r}`, one `M × τ_d` matrix per emitter/reader pair,
/// in the detector's pair order.
#[derive(Debug, Clone)]
pub struct ReceivedBlocks {
    pairs: Vec<(usize, usize)>,
    blocks: Vec<Array2<Complex64>>,
}

impl ReceivedBlocks {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn block(&self, index: usize) -> &Array2<Complex64> {
        &self.blocks[index]
    }
}

/// Outcome of the threshold test.
#[derive(Debug, Clone, Copy)]
pub struct TestStatistic {
    pub llr_prime: f64,
    pub threshold: f64,
    /// Decided bit; `true` means bit 1.
    pub decision: bool,
}

// A tie decides bit 0: a zero-probability event under continuous noise,
// fixed for determinism.
fn decide(llr_prime: f64, threshold: f64) -> bool {
    llr_prime > threshold
}

/// Precomputed per-pair quantities: the known direct-link block `G·Φ` and
/// the reflected-path block `A = g_r·g_tᵀ·Φ`.
struct PairTerm {
    direct: Array2<Complex64>,
    reflect: Array2<Complex64>,
    reflect_norm_sq: f64,
}

fn build_pair_terms(
    real: &ChannelRealization,
    phi: &ProbingSignal,
    pairs: &[(usize, usize)],
) -> Result<Vec<PairTerm>> {
    let m = real.deployment().antennas_per_ap();
    if phi.antennas() != m {
        return Err(Error::InvalidArgument(format!(
            "probing signal has {} antennas but the deployment has {m}",
            phi.antennas()
        )));
    }
    let tau = phi.slot_length();
    let mut terms = Vec::with_capacity(pairs.len());
    for &(t, r) in pairs {
        let direct = real.inter_ap(t, r).dot(phi.matrix());
        let row = phi.matrix().t().dot(real.bd_channel(t)); // g_tᵀ·Φ
        let g_r = real.bd_channel(r);
        let reflect = Array2::from_shape_fn((m, tau), |(i, l)| g_r[i] * row[l]);
        let reflect_norm_sq = reflect.iter().map(|z| z.norm_sqr()).sum();
        terms.push(PairTerm {
            direct,
            reflect,
            reflect_norm_sq,
        });
    }
    Ok(terms)
}

fn sample_noise(rng: &mut ChaCha12Rng, m: usize, tau: usize) -> Array2<Complex64> {
    let sigma = std::f64::consts::FRAC_1_SQRT_2; // CN(0,1): each part has variance 1/2
    Array2::from_shape_fn((m, tau), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * sigma, im * sigma)
    })
}

fn blocks_from_terms(
    pairs: &[(usize, usize)],
    terms: &[PairTerm],
    gamma: f64,
    mut rng: Option<&mut ChaCha12Rng>,
    m: usize,
    tau: usize,
) -> ReceivedBlocks {
    let blocks = terms
        .iter()
        .map(|term| {
            let mut y = &term.direct + &term.reflect.mapv(|z| z * gamma);
            if let Some(rng) = rng.as_deref_mut() {
                y += &sample_noise(rng, m, tau);
            }
            y
        })
        .collect();
    ReceivedBlocks {
        pairs: pairs.to_vec(),
        blocks,
    }
}

/// Simulate the received blocks for one transmitted `bit`, with i.i.d.
/// `CN(0, 1)` noise drawn deterministically from `seed`.
pub fn simulate_received(
    real: &ChannelRealization,
    phi: &ProbingSignal,
    cfg: &DetectorConfig,
    bit: bool,
    seed: u64,
) -> Result<ReceivedBlocks> {
    let pairs = cfg.pair_list(real.deployment().num_aps())?;
    let terms = build_pair_terms(real, phi, &pairs)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(blocks_from_terms(
        &pairs,
        &terms,
        cfg.gamma_for(bit),
        Some(&mut rng),
        phi.antennas(),
        phi.slot_length(),
    ))
}

/// Noise-free variant of [`simulate_received`] for model identities.
pub fn simulate_received_noiseless(
    real: &ChannelRealization,
    phi: &ProbingSignal,
    cfg: &DetectorConfig,
    bit: bool,
) -> Result<ReceivedBlocks> {
    let pairs = cfg.pair_list(real.deployment().num_aps())?;
    let terms = build_pair_terms(real, phi, &pairs)?;
    Ok(blocks_from_terms(
        &pairs,
        &terms,
        cfg.gamma_for(bit),
        None,
        phi.antennas(),
        phi.slot_length(),
    ))
}

fn llr_from_terms(
    terms: &[PairTerm],
    blocks: &ReceivedBlocks,
    cfg: &DetectorConfig,
) -> TestStatistic {
    let mut llr_prime = 0.0;
    let mut sum_a_sq = 0.0;
    for (term, y) in terms.iter().zip(&blocks.blocks) {
        // Re{Tr{A·Y′ᴴ}} = Σ_entries Re(A ∘ conj(Y − G·Φ))
        llr_prime += term
            .reflect
            .iter()
            .zip(y.iter().zip(term.direct.iter()))
            .map(|(a, (y, d))| (a * (y - d).conj()).re)
            .sum::<f64>();
        sum_a_sq += term.reflect_norm_sq;
    }
    let mut threshold = 0.5 * (cfg.gamma1 + cfg.gamma0) * sum_a_sq;
    if cfg.prior0 != cfg.prior1 {
        threshold += (cfg.prior0 / cfg.prior1).ln() / (2.0 * (cfg.gamma1 - cfg.gamma0));
    }
    TestStatistic {
        llr_prime,
        threshold,
        decision: decide(llr_prime, threshold),
    }
}

/// Run the threshold detector on received blocks.
///
/// The known direct links are subtracted, the residual is matched-filtered
/// against `A_{t,r}`, and the statistic is compared to the MAP threshold.
pub fn llr_detect(
    blocks: &ReceivedBlocks,
    real: &ChannelRealization,
    phi: &ProbingSignal,
    cfg: &DetectorConfig,
) -> Result<TestStatistic> {
    let pairs = cfg.pair_list(real.deployment().num_aps())?;
    if pairs != blocks.pairs {
        return Err(Error::InvalidArgument(
            "received blocks do not match the configuration's pair list".into(),
        ));
    }
    let shape = (phi.antennas(), phi.slot_length());
    for b in &blocks.blocks {
        if b.dim() != shape {
            return Err(Error::InvalidArgument(format!(
                "received block shape {:?} does not match the probing signal {:?}",
                b.dim(),
                shape
            )));
        }
    }
    let terms = build_pair_terms(real, phi, &pairs)?;
    Ok(llr_from_terms(&terms, blocks, cfg))
}

fn geometry_metric(dep: &Deployment, bd: Point, pairs: &[(usize, usize)]) -> Result<f64> {
    let mut sum = 0.0;
    for &(t, r) in pairs {
        let bt = crate::geometry::path_gain(dep.ap(t), bd)?;
        let br = crate::geometry::path_gain(dep.ap(r), bd)?;
        sum += bt * br;
    }
    Ok(sum)
}

/// Exact error probability of the detector from geometry alone.
///
/// Valid for the equal-prior threshold; no channel draw is needed because
/// free-space LOS norms make `Σ‖A‖²` a pure function of distances.
pub fn closed_form_pe(
    dep: &Deployment,
    bd: Point,
    cfg: &DetectorConfig,
    phi: &ProbingSignal,
) -> Result<PeResult> {
    if phi.antennas() != dep.antennas_per_ap() {
        return Err(Error::InvalidArgument(
            "probing signal antenna count does not match the deployment".into(),
        ));
    }
    let pairs = cfg.pair_list(dep.num_aps())?;
    let metric = geometry_metric(dep, bd, &pairs)?;
    pe_from_metric(
        cfg.gamma0,
        cfg.gamma1,
        phi.transmit_snr(),
        dep.antennas_per_ap(),
        metric,
    )
}

/// Exact error probability when the emitters transmit simultaneously with
/// orthogonal sequences; readers are the complement of the emitter set.
///
/// The general form carries a `T·η` energy factor; with the total-energy
/// choice `η = 1/T` it reduces to [`closed_form_pe`] evaluated on the
/// complement reader sets.
pub fn closed_form_pe_case3(
    dep: &Deployment,
    bd: Point,
    cfg: &DetectorConfig,
    phi: &ProbingSignal,
    seqs: &OrthogonalSequenceSet,
) -> Result<PeResult> {
    if phi.antennas() != dep.antennas_per_ap() {
        return Err(Error::InvalidArgument(
            "probing signal antenna count does not match the deployment".into(),
        ));
    }
    let slots = cfg.ce_set.len();
    if seqs.num_slots() != slots {
        return Err(Error::InvalidArgument(format!(
            "sequence set has {} slots but the emitter set has {slots}",
            seqs.num_slots()
        )));
    }
    let k = dep.num_aps();
    let mut pairs = Vec::new();
    for &t in &cfg.ce_set {
        if t >= k {
            return Err(Error::InvalidArgument(format!(
                "emitter index {t} out of range for {k} APs"
            )));
        }
        for r in 0..k {
            if !cfg.ce_set.contains(&r) {
                pairs.push((t, r));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::InvalidArgument(
            "emitter set covers all APs, leaving no readers".into(),
        ));
    }
    let metric = geometry_metric(dep, bd, &pairs)?;
    let energy_factor = slots as f64 * seqs.eta();
    pe_from_metric(
        cfg.gamma0,
        cfg.gamma1,
        phi.transmit_snr(),
        dep.antennas_per_ap(),
        energy_factor * metric,
    )
}

/// Per-slot received blocks when all emitters transmit simultaneously:
/// reader `r` observes the coherent sum of the emitters' contributions in
/// every slot `l`.
#[derive(Debug, Clone)]
pub struct SlotBlocks {
    readers: Vec<usize>,
    slots: usize,
    /// Indexed `[reader_index * slots + slot]`.
    blocks: Vec<Array2<Complex64>>,
}

impl SlotBlocks {
    pub fn readers(&self) -> &[usize] {
        &self.readers
    }

    pub fn block(&self, reader_index: usize, slot: usize) -> &Array2<Complex64> {
        &self.blocks[reader_index * self.slots + slot]
    }
}

fn slot_blocks_impl(
    real: &ChannelRealization,
    phi: &ProbingSignal,
    seqs: &OrthogonalSequenceSet,
    cfg: &DetectorConfig,
    bit: bool,
    mut rng: Option<&mut ChaCha12Rng>,
) -> Result<SlotBlocks> {
    let k = real.deployment().num_aps();
    let slots = cfg.ce_set.len();
    if seqs.num_slots() != slots {
        return Err(Error::InvalidArgument(format!(
            "sequence set has {} slots but the emitter set has {slots}",
            seqs.num_slots()
        )));
    }
    let readers: Vec<usize> = (0..k).filter(|r| !cfg.ce_set.contains(r)).collect();
    if readers.is_empty() {
        return Err(Error::InvalidArgument(
            "emitter set covers all APs, leaving no readers".into(),
        ));
    }
    let gamma = cfg.gamma_for(bit);
    let m = phi.antennas();
    let tau = phi.slot_length();
    let mut blocks = Vec::with_capacity(readers.len() * slots);
    for &r in &readers {
        // Emitter t's contribution before spreading: (G_{t,r} + γ·g_r·g_tᵀ)·Φ.
        let contributions: Vec<Array2<Complex64>> = cfg
            .ce_set
            .iter()
            .map(|&t| {
                let direct = real.inter_ap(t, r).dot(phi.matrix());
                let row = phi.matrix().t().dot(real.bd_channel(t));
                let g_r = real.bd_channel(r);
                let reflect = Array2::from_shape_fn((m, tau), |(i, l)| g_r[i] * row[l]);
                direct + reflect.mapv(|z| z * gamma)
            })
            .collect();
        for l in 0..slots {
            let mut y = match rng.as_deref_mut() {
                Some(rng) => sample_noise(rng, m, tau),
                None => Array2::zeros((m, tau)),
            };
            for (t_idx, contribution) in contributions.iter().enumerate() {
                let c = seqs.coefficient(t_idx, l);
                y += &contribution.mapv(|z| z * c);
            }
            blocks.push(y);
        }
    }
    Ok(SlotBlocks {
        readers,
        slots,
        blocks,
    })
}

/// Simulate the simultaneous-emitter reception for one transmitted `bit`.
pub fn simulate_received_simultaneous(
    real: &ChannelRealization,
    phi: &ProbingSignal,
    seqs: &OrthogonalSequenceSet,
    cfg: &DetectorConfig,
    bit: bool,
    seed: u64,
) -> Result<SlotBlocks> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    slot_blocks_impl(real, phi, seqs, cfg, bit, Some(&mut rng))
}

/// Noise-free variant of [`simulate_received_simultaneous`].
pub fn simulate_received_simultaneous_noiseless(
    real: &ChannelRealization,
    phi: &ProbingSignal,
    seqs: &OrthogonalSequenceSet,
    cfg: &DetectorConfig,
    bit: bool,
) -> Result<SlotBlocks> {
    slot_blocks_impl(real, phi, seqs, cfg, bit, None)
}

/// Despread simultaneous-emitter slot blocks into per-pair blocks.
///
/// Correlating reader `r`'s slot sequence against emitter `t`'s known
/// sequence isolates that emitter's contribution (`Σ_l c_t^l·conj(c_t^l) =
/// η·T = 1`) and leaves unit-variance noise, so the result feeds
/// [`llr_detect`] unchanged under the `Complement` reader policy.
pub fn despread(
    slot_blocks: &SlotBlocks,
    seqs: &OrthogonalSequenceSet,
    cfg: &DetectorConfig,
) -> Result<ReceivedBlocks> {
    if seqs.num_slots() != slot_blocks.slots {
        return Err(Error::InvalidArgument(
            "sequence set does not match the slot count".into(),
        ));
    }
    let mut pairs = Vec::new();
    let mut blocks = Vec::new();
    for (t_idx, &t) in cfg.ce_set.iter().enumerate() {
        for (r_idx, &r) in slot_blocks.readers.iter().enumerate() {
            let mut acc: Option<Array2<Complex64>> = None;
            for l in 0..slot_blocks.slots {
                let weight = seqs.coefficient(t_idx, l).conj();
                let contribution =
                    slot_blocks.blocks[r_idx * slot_blocks.slots + l].mapv(|z| z * weight);
                acc = Some(match acc {
                    Some(a) => a + contribution,
                    None => contribution,
                });
            }
            pairs.push((t, r));
            blocks.push(acc.expect("at least one slot"));
        }
    }
    Ok(ReceivedBlocks { pairs, blocks })
}

/// Monte-Carlo bit-error estimate with a binomial confidence interval.
#[derive(Debug, Clone, Copy)]
pub struct McBer {
    pub ber: f64,
    /// 95% confidence half-width `1.96·√(p̂(1−p̂)/n)`.
    pub ci_halfwidth: f64,
    pub n_trials: usize,
    pub n_errors: usize,
}

/// Estimate the bit-error rate by running the full simulate→detect pipeline
/// `n_trials` times with equal-prior bit draws.
///
/// One channel realization is synthesized from a seed derived from `seed`;
/// each trial then draws its bit and noise from its own derived seed, so the
/// estimate is reproducible and independent of the worker-thread count.
/// Under the `Complement` policy every trial exercises the
/// simultaneous-emitter path (spreading, coherent sum, despreading).
pub fn monte_carlo_ber(
    dep: &Deployment,
    bd: Point,
    cfg: &DetectorConfig,
    phi: &ProbingSignal,
    n_trials: usize,
    seed: u64,
) -> Result<McBer> {
    if n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be at least 1".into()));
    }
    let real = synthesize_channels(dep, bd, derive_seed(seed, 0))?;
    let pairs = cfg.pair_list(dep.num_aps())?;
    let terms = build_pair_terms(&real, phi, &pairs)?;
    let m = phi.antennas();
    let tau = phi.slot_length();
    let seqs = matches!(cfg.reader_policy, ReaderPolicy::Complement)
        .then(|| make_orthogonal_sequences(cfg.ce_set.len()));

    let n_errors: usize = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, 1 + trial as u64));
            let bit = rng.random_bool(0.5);
            let stat = if let Some(seqs) = &seqs {
                let slot_blocks = slot_blocks_impl(&real, phi, seqs, cfg, bit, Some(&mut rng))
                    .expect("validated above");
                let blocks = despread(&slot_blocks, seqs, cfg).expect("consistent slot count");
                llr_from_terms(&terms, &blocks, cfg)
            } else {
                let blocks =
                    blocks_from_terms(&pairs, &terms, cfg.gamma_for(bit), Some(&mut rng), m, tau);
                llr_from_terms(&terms, &blocks, cfg)
            };
            usize::from(stat.decision != bit)
        })
        .sum();

    let ber = n_errors as f64 / n_trials as f64;
    Ok(McBer {
        ber,
        ci_halfwidth: 1.96 * (ber * (1.0 - ber) / n_trials as f64).sqrt(),
        n_trials,
        n_errors,
    })
}

/// Sum of `‖A_{t,r}‖²` over the configuration's pairs, computed from channel
/// norms rather than materialized blocks. Exposed for threshold validation.
pub fn sum_reflected_norms(
    real: &ChannelRealization,
    phi: &ProbingSignal,
    cfg: &DetectorConfig,
) -> Result<f64> {
    let factor = phi.transmit_power() * phi.slot_length() as f64 / phi.antennas() as f64;
    let pairs = cfg.pair_list(real.deployment().num_aps())?;
    let mut sum = 0.0;
    for (t, r) in pairs {
        let norm_t: f64 = real.bd_channel(t).iter().map(|z| z.norm_sqr()).sum();
        let norm_r: f64 = real.bd_channel(r).iter().map(|z| z.norm_sqr()).sum();
        sum += factor * norm_t * norm_r;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_probing_signal;
    use crate::geometry::{Point, Rectangle};
    use approx::assert_relative_eq;

    /// Independent Q-function oracle: composite Simpson quadrature of the
    /// standard normal density on [0, x], with Q(x) = 1/2 − ∫₀ˣ φ(u) du.
    fn q_oracle(x: f64) -> f64 {
        assert!(x >= 0.0);
        let n = 20_000usize;
        let h = x / n as f64;
        let density = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = density(0.0) + density(x);
        for i in 1..n {
            s += density(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        0.5 - s * h / 3.0
    }

    #[test]
    fn q_function_matches_quadrature_oracle() {
        for x in [0.0, 0.1, 0.5, 1.0, std::f64::consts::FRAC_1_SQRT_2, 2.0, 3.0, 5.0] {
            assert!(
                (q_function(x) - q_oracle(x)).abs() < 1e-12,
                "Q({x}) = {} vs oracle {}",
                q_function(x),
                q_oracle(x)
            );
        }
        // Frozen values, cross-checked against the quadrature oracle above.
        assert_relative_eq!(q_function(1.0), 0.15865525393145707, epsilon = 1e-14);
        assert_relative_eq!(
            q_function(std::f64::consts::FRAC_1_SQRT_2),
            0.23975006109347677,
            epsilon = 1e-14
        );
    }

    #[test]
    fn pe_from_metric_examples() {
        // γ1 = γ0 limit: argument 0, Pe = 1/2.
        let r = pe_from_metric(0.5, 0.5, 10.0, 4, 1.0).unwrap();
        assert_eq!(r.argument, 0.0);
        assert_eq!(r.pe, 0.5);

        // (γ1−γ0) = 1 and Σ‖A‖² = 2 ⇒ argument 1, Pe = Q(1).
        let r = pe_from_metric(0.0, 1.0, 1.0, 1, 2.0).unwrap();
        assert_relative_eq!(r.argument, 1.0);
        assert_relative_eq!(r.pe, 0.15865525393145707, epsilon = 1e-14);

        assert!(pe_from_metric(1.0, 0.0, 1.0, 1, 1.0).is_err());
        assert!(pe_from_metric(0.0, 1.0, -1.0, 1, 1.0).is_err());
    }

    fn unit_coverage() -> Rectangle {
        Rectangle::new(Point::new(0.0, 0.0), 100.0, 100.0).unwrap()
    }

    fn simple_setup(
        m: usize,
        tau: usize,
        power: f64,
    ) -> (Deployment, ChannelRealization, ProbingSignal, DetectorConfig) {
        let dep = Deployment::new(
            vec![Point::new(-2.0, 0.0), Point::new(2.0, 0.0)],
            m,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(0.0, 1.5);
        let real = synthesize_channels(&dep, bd, 11).unwrap();
        let phi = make_probing_signal(m, tau, power).unwrap();
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![0], ReaderPolicy::AllOthers).unwrap();
        (dep, real, phi, cfg)
    }

    #[test]
    fn config_validation() {
        assert!(DetectorConfig::equal_priors(1.0, 1.0, vec![0], ReaderPolicy::AllOthers).is_err());
        assert!(DetectorConfig::equal_priors(1.0, 0.5, vec![0], ReaderPolicy::AllOthers).is_err());
        assert!(DetectorConfig::equal_priors(0.0, 1.0, vec![], ReaderPolicy::AllOthers).is_err());
        assert!(
            DetectorConfig::equal_priors(0.0, 1.0, vec![0, 0], ReaderPolicy::AllOthers).is_err()
        );
        assert!(DetectorConfig::new(0.0, 1.0, 0.7, 0.7, vec![0], ReaderPolicy::AllOthers).is_err());
        // An explicit reader list containing an emitter's own slot is rejected.
        let cfg = DetectorConfig::equal_priors(0.0, 1.0, vec![0], ReaderPolicy::Explicit(vec![0]))
            .unwrap();
        assert!(cfg.pair_list(2).is_err());
        // Emitters covering every AP leave no readers under Complement.
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![0, 1], ReaderPolicy::Complement).unwrap();
        assert!(cfg.pair_list(2).is_err());
    }

    #[test]
    fn pair_list_mirrors_slot_schedules() {
        // Rotating emitters: idle emitters read in the other slots.
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![1, 2], ReaderPolicy::AllOthers).unwrap();
        assert_eq!(
            cfg.pair_list(4).unwrap(),
            vec![(1, 0), (1, 2), (1, 3), (2, 0), (2, 1), (2, 3)]
        );
        // Simultaneous emitters: fixed complement reader set.
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![1, 2], ReaderPolicy::Complement).unwrap();
        assert_eq!(cfg.pair_list(4).unwrap(), vec![(1, 0), (1, 3), (2, 0), (2, 3)]);
    }

    #[test]
    fn noiseless_bit0_is_direct_link_only() {
        let (_dep, real, phi, cfg) = simple_setup(2, 2, 1.0);
        let blocks = simulate_received_noiseless(&real, &phi, &cfg, false).unwrap();
        // γ0 = 0: Y = G·Φ exactly.
        for (i, &(t, r)) in blocks.pairs().iter().enumerate() {
            let direct = real.inter_ap(t, r).dot(phi.matrix());
            let err: f64 = (blocks.block(i) - &direct).iter().map(|z| z.norm()).sum();
            assert_eq!(err, 0.0);
        }
    }

    #[test]
    fn noiseless_bit1_reflection_identity() {
        let (_dep, real, phi, cfg) = simple_setup(3, 4, 2.0);
        let blocks = simulate_received_noiseless(&real, &phi, &cfg, true).unwrap();
        for (i, &(t, r)) in blocks.pairs().iter().enumerate() {
            let direct = real.inter_ap(t, r).dot(phi.matrix());
            let row = phi.matrix().t().dot(real.bd_channel(t));
            let g_r = real.bd_channel(r);
            let diff = blocks.block(i) - &direct;
            for i_ant in 0..phi.antennas() {
                for l in 0..phi.slot_length() {
                    // γ1 = 1: Y − G·Φ = g_r·g_tᵀ·Φ.
                    assert!((diff[(i_ant, l)] - g_r[i_ant] * row[l]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn noiseless_llr_hits_the_textbook_values() {
        let (_dep, real, phi, cfg) = simple_setup(2, 3, 1.5);
        let sum_a = sum_reflected_norms(&real, &phi, &cfg).unwrap();

        let blocks1 = simulate_received_noiseless(&real, &phi, &cfg, true).unwrap();
        let stat1 = llr_detect(&blocks1, &real, &phi, &cfg).unwrap();
        assert_relative_eq!(stat1.llr_prime, sum_a, max_relative = 1e-8);
        assert_relative_eq!(stat1.threshold, sum_a / 2.0, max_relative = 1e-8);
        assert!(stat1.decision);

        let blocks0 = simulate_received_noiseless(&real, &phi, &cfg, false).unwrap();
        let stat0 = llr_detect(&blocks0, &real, &phi, &cfg).unwrap();
        assert!(stat0.llr_prime.abs() < 1e-12 * sum_a);
        assert!(!stat0.decision);
    }

    #[test]
    fn ties_decide_bit_zero() {
        assert!(!decide(1.0, 1.0));
        assert!(!decide(0.9999, 1.0));
        assert!(decide(1.0001, 1.0));
    }

    #[test]
    fn threshold_matches_channel_norm_identity() {
        let (_dep, real, phi, cfg) = simple_setup(4, 6, 3.0);
        let blocks = simulate_received(&real, &phi, &cfg, true, 99).unwrap();
        let stat = llr_detect(&blocks, &real, &phi, &cfg).unwrap();
        let sum_a = sum_reflected_norms(&real, &phi, &cfg).unwrap();
        assert_relative_eq!(
            stat.threshold,
            0.5 * (cfg.gamma1() + cfg.gamma0()) * sum_a,
            max_relative = 1e-8
        );
    }

    #[test]
    fn unequal_priors_shift_the_threshold() {
        let (_dep, real, phi, _) = simple_setup(2, 2, 1.0);
        let eq = DetectorConfig::equal_priors(0.0, 1.0, vec![0], ReaderPolicy::AllOthers).unwrap();
        let skew =
            DetectorConfig::new(0.0, 1.0, 0.9, 0.1, vec![0], ReaderPolicy::AllOthers).unwrap();
        let blocks = simulate_received(&real, &phi, &eq, false, 7).unwrap();
        let stat_eq = llr_detect(&blocks, &real, &phi, &eq).unwrap();
        let stat_skew = llr_detect(&blocks, &real, &phi, &skew).unwrap();
        // A strong prior on bit 0 raises the bar for deciding 1.
        assert!(stat_skew.threshold > stat_eq.threshold);
        assert_relative_eq!(
            stat_skew.threshold - stat_eq.threshold,
            (0.9f64 / 0.1).ln() / 2.0,
            max_relative = 1e-10
        );
    }

    #[test]
    fn llr_statistic_moments_match_model() {
        let (_dep, real, phi, cfg) = simple_setup(2, 2, 4.0);
        let sum_a = sum_reflected_norms(&real, &phi, &cfg).unwrap();
        let n = 20_000usize;
        for (bit, gamma) in [(false, cfg.gamma0()), (true, cfg.gamma1())] {
            let stats: Vec<f64> = (0..n)
                .map(|i| {
                    let blocks =
                        simulate_received(&real, &phi, &cfg, bit, 1000 + i as u64).unwrap();
                    llr_detect(&blocks, &real, &phi, &cfg).unwrap().llr_prime
                })
                .collect();
            let mean = stats.iter().sum::<f64>() / n as f64;
            let var = stats.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64;
            let target_mean = gamma * sum_a;
            let target_var = 0.5 * sum_a;
            let mean_se = (target_var / n as f64).sqrt();
            let var_se = target_var * (2.0 / (n as f64 - 1.0)).sqrt();
            assert!(
                (mean - target_mean).abs() < 3.0 * mean_se,
                "bit {bit}: mean {mean} vs {target_mean} (se {mean_se})"
            );
            assert!(
                (var - target_var).abs() < 3.0 * var_se,
                "bit {bit}: var {var} vs {target_var} (se {var_se})"
            );
        }
    }

    #[test]
    fn closed_form_pe_symmetric_two_ap_example() {
        // Two APs at distance 1 from the device, p_t = τ_d = M = 1:
        // argument = 1/√2, Pe = Q(0.7071) ≈ 0.2398.
        let dep = Deployment::new(
            vec![Point::new(-1.0, 0.0), Point::new(1.0, 0.0)],
            1,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(0.0, 0.0);
        let phi = make_probing_signal(1, 1, 1.0).unwrap();
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![0], ReaderPolicy::AllOthers).unwrap();
        let pe = closed_form_pe(&dep, bd, &cfg, &phi).unwrap();
        assert_relative_eq!(pe.argument, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(pe.pe, 0.23975006109347677, epsilon = 1e-13);
    }

    #[test]
    fn closed_form_pe_strictly_monotone() {
        let dep = |m| {
            Deployment::new(
                vec![Point::new(-3.0, 0.0), Point::new(3.0, 1.0)],
                m,
                unit_coverage(),
            )
            .unwrap()
        };
        let bd = Point::new(0.5, 2.0);
        let pe = |m: usize, tau: usize, p: f64, g1: f64| {
            let cfg =
                DetectorConfig::equal_priors(0.0, g1, vec![0], ReaderPolicy::AllOthers).unwrap();
            closed_form_pe(&dep(m), bd, &cfg, &make_probing_signal(m, tau, p).unwrap())
                .unwrap()
                .pe
        };
        let base = pe(2, 2, 1.0, 1.0);
        assert!(pe(2, 2, 2.0, 1.0) < base, "more power helps");
        assert!(pe(2, 4, 1.0, 1.0) < base, "longer slots help");
        assert!(pe(4, 4, 1.0, 1.0) < base, "more antennas help");
        assert!(pe(2, 2, 1.0, 2.0) < base, "larger reflection swing helps");
    }

    #[test]
    fn case3_reduces_to_main_formula_for_one_emitter() {
        let dep = Deployment::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(5.0, 0.0),
                Point::new(0.0, 6.0),
            ],
            2,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(2.0, 2.0);
        let phi = make_probing_signal(2, 2, 3.0).unwrap();
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![1], ReaderPolicy::Complement).unwrap();
        let seqs = make_orthogonal_sequences(1);
        let case3 = closed_form_pe_case3(&dep, bd, &cfg, &phi, &seqs).unwrap();
        let main = closed_form_pe(&dep, bd, &cfg, &phi).unwrap();
        assert_eq!(case3.argument, main.argument);
        assert_eq!(case3.pe, main.pe);
    }

    #[test]
    fn case3_matches_main_formula_on_complement_readers() {
        // Symmetric square, two emitters: with η = 1/T the energy factor is 1
        // and the Case-3 Pe equals the main formula restricted to the two
        // non-emitter readers.
        let dep = Deployment::new(
            vec![
                Point::new(-4.0, -4.0),
                Point::new(4.0, -4.0),
                Point::new(4.0, 4.0),
                Point::new(-4.0, 4.0),
            ],
            2,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(0.5, 0.25);
        let phi = make_probing_signal(2, 2, 2.0).unwrap();
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![0, 1], ReaderPolicy::Complement).unwrap();
        let seqs = make_orthogonal_sequences(2);
        let case3 = closed_form_pe_case3(&dep, bd, &cfg, &phi, &seqs).unwrap();
        let main = closed_form_pe(&dep, bd, &cfg, &phi).unwrap();
        assert_relative_eq!(case3.argument, main.argument, max_relative = 1e-12);
    }

    #[test]
    fn despreading_noise_free_sum_recovers_per_pair_blocks() {
        let dep = Deployment::new(
            vec![
                Point::new(-4.0, 0.0),
                Point::new(4.0, 0.0),
                Point::new(0.0, 5.0),
                Point::new(0.0, -5.0),
            ],
            2,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(1.0, 1.0);
        let real = synthesize_channels(&dep, bd, 21).unwrap();
        let phi = make_probing_signal(2, 3, 1.0).unwrap();
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![0, 1], ReaderPolicy::Complement).unwrap();
        let seqs = make_orthogonal_sequences(2);

        let quiet =
            simulate_received_simultaneous_noiseless(&real, &phi, &seqs, &cfg, true).unwrap();
        let despread_blocks = despread(&quiet, &seqs, &cfg).unwrap();
        let reference = simulate_received_noiseless(&real, &phi, &cfg, true).unwrap();
        assert_eq!(despread_blocks.pairs(), reference.pairs());
        for i in 0..reference.pairs().len() {
            let err: f64 = (despread_blocks.block(i) - reference.block(i))
                .iter()
                .map(|z| z.norm())
                .sum();
            assert!(err < 1e-10, "pair {i} despread mismatch {err}");
        }
    }

    #[test]
    fn monte_carlo_matches_closed_form_on_snr_sweep() {
        let dep = Deployment::new(
            vec![Point::new(-2.0, 0.0), Point::new(2.5, 0.5)],
            2,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(0.0, 1.0);
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![0], ReaderPolicy::AllOthers).unwrap();
        let n = 10_000usize;
        for (i, snr_db) in (0..10).map(|i| (i, -2.0 + i as f64)) {
            let p = 10f64.powf(snr_db / 10.0) / 2.0;
            let phi = make_probing_signal(2, 2, p).unwrap();
            let exact = closed_form_pe(&dep, bd, &cfg, &phi).unwrap().pe;
            let mc = monte_carlo_ber(&dep, bd, &cfg, &phi, n, 31 + i as u64).unwrap();
            let band = 3.0 * (exact * (1.0 - exact) / n as f64).sqrt();
            assert!(
                (mc.ber - exact).abs() <= band,
                "snr {snr_db} dB: mc {} vs exact {exact} (band {band})",
                mc.ber
            );
        }
    }

    #[test]
    fn monte_carlo_simultaneous_matches_case3_closed_form() {
        let dep = Deployment::new(
            vec![
                Point::new(-3.0, 0.0),
                Point::new(3.0, 0.0),
                Point::new(0.0, 4.0),
                Point::new(1.0, -4.0),
            ],
            2,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(0.5, 1.0);
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![0, 1], ReaderPolicy::Complement).unwrap();
        let phi = make_probing_signal(2, 2, 4.0).unwrap();
        let seqs = make_orthogonal_sequences(2);
        let exact = closed_form_pe_case3(&dep, bd, &cfg, &phi, &seqs).unwrap().pe;
        let n = 20_000usize;
        let mc = monte_carlo_ber(&dep, bd, &cfg, &phi, n, 77).unwrap();
        let band = 3.0 * (exact * (1.0 - exact) / n as f64).sqrt();
        assert!(
            (mc.ber - exact).abs() <= band,
            "mc {} vs case-3 exact {exact} (band {band})",
            mc.ber
        );
    }

    #[test]
    fn indistinguishable_hypotheses_give_coin_flip_ber() {
        let dep = Deployment::new(
            vec![Point::new(-2.0, 0.0), Point::new(2.0, 0.0)],
            1,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(0.0, 1.0);
        // γ1 − γ0 tiny: hypotheses effectively indistinguishable at this SNR.
        let cfg =
            DetectorConfig::equal_priors(0.0, 1e-9, vec![0], ReaderPolicy::AllOthers).unwrap();
        let phi = make_probing_signal(1, 1, 1.0).unwrap();
        let mc = monte_carlo_ber(&dep, bd, &cfg, &phi, 20_000, 5).unwrap();
        assert!((mc.ber - 0.5).abs() < 0.02, "ber {} should be ~0.5", mc.ber);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let (dep, _real, phi, cfg) = simple_setup(2, 2, 1.0);
        let bd = Point::new(0.0, 1.5);
        let a = monte_carlo_ber(&dep, bd, &cfg, &phi, 5_000, 123).unwrap();
        let b = monte_carlo_ber(&dep, bd, &cfg, &phi, 5_000, 123).unwrap();
        assert_eq!(a.n_errors, b.n_errors);
    }

    #[test]
    fn phase_invariance_across_channel_seeds() {
        // Closed-form Pe is geometry-only; Monte-Carlo BER across two channel
        // seeds must agree within a two-proportion z-test at α = 0.01.
        let dep = Deployment::new(
            vec![Point::new(-2.0, 0.0), Point::new(2.0, 1.0)],
            2,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(0.3, 1.2);
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![0], ReaderPolicy::AllOthers).unwrap();
        let phi = make_probing_signal(2, 2, 1.5).unwrap();
        let n = 40_000usize;
        let a = monte_carlo_ber(&dep, bd, &cfg, &phi, n, 1001).unwrap();
        let b = monte_carlo_ber(&dep, bd, &cfg, &phi, n, 2002).unwrap();
        let pooled = (a.n_errors + b.n_errors) as f64 / (2 * n) as f64;
        let z = (a.ber - b.ber) / (pooled * (1.0 - pooled) * 2.0 / n as f64).sqrt();
        assert!(z.abs() < 2.576, "z = {z} exceeds the α = 0.01 critical value");
    }

    #[test]
    fn doubling_energy_improves_ber_as_predicted() {
        let dep = Deployment::new(
            vec![Point::new(-2.0, 0.0), Point::new(2.0, 0.0)],
            2,
            unit_coverage(),
        )
        .unwrap();
        let bd = Point::new(0.0, 1.0);
        let cfg =
            DetectorConfig::equal_priors(0.0, 1.0, vec![0], ReaderPolicy::AllOthers).unwrap();
        let phi1 = make_probing_signal(2, 2, 0.5).unwrap();
        let phi2 = make_probing_signal(2, 2, 1.0).unwrap();
        let e1 = closed_form_pe(&dep, bd, &cfg, &phi1).unwrap();
        let e2 = closed_form_pe(&dep, bd, &cfg, &phi2).unwrap();
        assert_relative_eq!(
            e2.argument,
            std::f64::consts::SQRT_2 * e1.argument,
            max_relative = 1e-12
        );
        let n = 30_000usize;
        let mc1 = monte_carlo_ber(&dep, bd, &cfg, &phi1, n, 8).unwrap();
        let mc2 = monte_carlo_ber(&dep, bd, &cfg, &phi2, n, 9).unwrap();
        let band = 3.0 * (e1.pe * (1.0 - e1.pe) / n as f64).sqrt()
            + 3.0 * (e2.pe * (1.0 - e2.pe) / n as f64).sqrt();
        assert!(mc2.ber < mc1.ber + band, "doubling energy must not hurt");
        assert!((mc2.ber - e2.pe).abs() <= band);
    }

    #[test]
    fn llr_detect_rejects_mismatched_blocks() {
        let (_dep, real, phi, cfg) = simple_setup(2, 2, 1.0);
        let blocks = simulate_received(&real, &phi, &cfg, true, 3).unwrap();
        let other =
            DetectorConfig::equal_priors(0.0, 1.0, vec![1], ReaderPolicy::AllOthers).unwrap();
        assert!(llr_detect(&blocks, &real, &phi, &other).is_err());
        let phi_bad = make_probing_signal(2, 3, 1.0).unwrap();
        assert!(llr_detect(&blocks, &real, &phi_bad, &cfg).is_err());
    }
}
