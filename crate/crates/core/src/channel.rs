//! Synthesis of complex channel realizations and orthogonal probing signals.
//!
//! The free-space line-of-sight model fixes only channel *norms*: an AP at
//! distance `d` from the backscatter device sees `‖g‖² = M/d²`. Every closed
//! form downstream is phase-invariant, so entry phases are drawn i.i.d.
//! uniform — Monte-Carlo detection then exercises genuinely complex
//! arithmetic while matching all norm constraints. Synthesis is pure given
//! `(deployment, bd, seed)` and realizations are immutable.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::TAU;

use crate::geometry::{distance, path_gain, Deployment, Point};
use crate::{Error, Result};

/// Orthogonal probing signal transmitted by a carrier emitter in one slot.
///
/// The matrix `Φ` has shape `M × τ_d` with `τ_d ≥ M` and satisfies
/// `Φ·Φᴴ = (p_t·τ_d / M)·I_M`; its total energy is `‖Φ‖² = p_t·τ_d`.
/// Under the unit-variance noise normalization used throughout, the
/// transmit SNR is exactly `p_t·τ_d`.
#[derive(Debug, Clone)]
pub struct ProbingSignal {
    matrix: Array2<Complex64>,
    transmit_power: f64,
}

impl ProbingSignal {
    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn antennas(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn slot_length(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn transmit_power(&self) -> f64 {
        self.transmit_power
    }

    /// Total transmitted energy `‖Φ‖² = p_t·τ_d`.
    pub fn energy(&self) -> f64 {
        self.transmit_power * self.slot_length() as f64
    }

    /// Transmit SNR `p_t·τ_d` (noise entries are unit variance).
    pub fn transmit_snr(&self) -> f64 {
        self.energy()
    }
}

/// Build the probing signal for `antennas` antennas, `slot_length` symbols,
/// and transmit power `transmit_power`.
///
/// Rows are the first `M` rows of a `τ_d`-point unitary harmonic basis,
/// scaled by `√(p_t·τ_d/M)`, which satisfies the orthogonality constraint
/// for every `τ_d ≥ M`.
pub fn make_probing_signal(
    antennas: usize,
    slot_length: usize,
    transmit_power: f64,
) -> Result<ProbingSignal> {
    if antennas == 0 {
        return Err(Error::InvalidArgument("antennas must be at least 1".into()));
    }
    if slot_length < antennas {
        return Err(Error::InvalidArgument(format!(
            "slot length {slot_length} must be at least the antenna count {antennas}"
        )));
    }
    if !transmit_power.is_finite() || transmit_power <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "transmit power must be positive and finite (got {transmit_power})"
        )));
    }
    let scale = (transmit_power / antennas as f64).sqrt();
    let tau = slot_length as f64;
    let matrix = Array2::from_shape_fn((antennas, slot_length), |(a, l)| {
        Complex64::from_polar(scale, -TAU * (a * l) as f64 / tau)
    });
    Ok(ProbingSignal {
        matrix,
        transmit_power,
    })
}

/// One synthesized channel realization for a fixed geometry.
///
/// `bd_channel(t)` is the length-`M` vector from the backscatter device to
/// AP `t` with `‖g_t‖² = M·β_t`. `inter_ap(t, r)` is the `M × M` matrix from
/// AP `t` to AP `r`; the reverse direction is its transpose by reciprocity,
/// shared storage makes the identity exact.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    deployment: Deployment,
    bd: Point,
    bd_channels: Vec<Array1<Complex64>>,
    // Upper triangle (t < r) in lexicographic order.
    inter_ap: Vec<Array2<Complex64>>,
}

impl ChannelRealization {
    pub fn deployment(&self) -> &Deployment {
        &self.deployment
    }

    pub fn bd(&self) -> Point {
        self.bd
    }

    /// Channel vector between the backscatter device and AP `t`.
    pub fn bd_channel(&self, t: usize) -> &Array1<Complex64> {
        &self.bd_channels[t]
    }

    /// Channel matrix from AP `t` to AP `r` (`t ≠ r`).
    pub fn inter_ap(&self, t: usize, r: usize) -> ArrayView2<'_, Complex64> {
        assert_ne!(t, r, "inter-AP channel needs two distinct APs");
        if t < r {
            self.inter_ap[upper_index(self.deployment.num_aps(), t, r)].view()
        } else {
            self.inter_ap[upper_index(self.deployment.num_aps(), r, t)].t()
        }
    }
}

fn upper_index(k: usize, t: usize, r: usize) -> usize {
    debug_assert!(t < r && r < k);
    t * (2 * k - t - 1) / 2 + (r - t - 1)
}

fn random_phase_vector(rng: &mut ChaCha12Rng, len: usize, magnitude: f64) -> Array1<Complex64> {
    Array1::from_shape_fn(len, |_| {
        Complex64::from_polar(magnitude, rng.random_range(0.0..TAU))
    })
}

/// Synthesize a channel realization for `dep` with the backscatter device at
/// `bd`, deterministically from `seed`.
///
/// Entry magnitudes are `√β` for the relevant link distance; phases are
/// i.i.d. uniform on `[0, 2π)`. Draw order is fixed (device channels for
/// `t = 0..K`, then inter-AP matrices for `t < r` row-major), so the same
/// seed reproduces the realization bit for bit.
pub fn synthesize_channels(dep: &Deployment, bd: Point, seed: u64) -> Result<ChannelRealization> {
    let k = dep.num_aps();
    let m = dep.antennas_per_ap();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut bd_channels = Vec::with_capacity(k);
    for t in 0..k {
        let beta = path_gain(dep.ap(t), bd)?;
        bd_channels.push(random_phase_vector(&mut rng, m, beta.sqrt()));
    }

    let mut inter_ap = Vec::with_capacity(k * (k - 1) / 2);
    for t in 0..k {
        for r in (t + 1)..k {
            let d = distance(dep.ap(t), dep.ap(r));
            let magnitude = (1.0 / (d * d)).sqrt();
            let flat = random_phase_vector(&mut rng, m * m, magnitude);
            inter_ap.push(flat.into_shape_with_order((m, m)).expect("m*m reshape"));
        }
    }

    Ok(ChannelRealization {
        deployment: dep.clone(),
        bd,
        bd_channels,
        inter_ap,
    })
}

/// Orthogonal spreading sequences for simultaneous carrier emitters.
///
/// Row `t` holds the per-slot coefficients `c_t^l` of emitter `t` over `T`
/// slots; rows are mutually orthogonal with `|c_t^l|² = η` and `η = 1/T`,
/// which keeps the total radiated energy per slot equal to a single
/// emitter's.
#[derive(Debug, Clone)]
pub struct OrthogonalSequenceSet {
    coefficients: Array2<Complex64>,
    eta: f64,
}

impl OrthogonalSequenceSet {
    pub fn num_slots(&self) -> usize {
        self.coefficients.nrows()
    }

    /// Coefficient of emitter row `t` in slot `l`.
    pub fn coefficient(&self, t: usize, l: usize) -> Complex64 {
        self.coefficients[(t, l)]
    }

    /// Power coefficient `η` with `|c_t^l|² = η` for every entry.
    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Build `T` mutually orthogonal unit-energy sequences of length `T`.
///
/// Rows of the unitary harmonic basis scaled by `1/√T`, valid for every
/// `T ≥ 1`. Panics if `T` is zero.
pub fn make_orthogonal_sequences(slots: usize) -> OrthogonalSequenceSet {
    assert!(slots >= 1, "at least one slot is required");
    let eta = 1.0 / slots as f64;
    let magnitude = eta.sqrt();
    let t_f = slots as f64;
    let coefficients = Array2::from_shape_fn((slots, slots), |(t, l)| {
        Complex64::from_polar(magnitude, -TAU * (t * l) as f64 / t_f)
    });
    OrthogonalSequenceSet { coefficients, eta }
}
