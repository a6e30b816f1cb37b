//! Geometry-only figures of merit for emitter selection.
//!
//! Error probability is monotone in a sum of round-trip gains
//! `1/(d_r²·d_t²)`, so emitter schedules can be compared on geometry alone.
//! Three schedules over `T` slots, all radiating the same energy per slot:
//!
//! - `Λ1` (rotating emitters): each of the `T` emitters probes in its own
//!   slot and every other AP reads, including idle emitters.
//! - `Λ2` (single nearest emitter): the AP nearest the device probes in all
//!   `T` slots; the other `K−1` APs read.
//! - `Λ3` (simultaneous emitters): the `T` emitters spread orthogonal
//!   sequences in every slot; only the `K−T` remaining APs read.
//!
//! For any emitter set, `Λ2 ≥ Λ1 ≥ Λ3`, which is why a single well-chosen
//! emitter is optimal. `Λ2/T` with the emitter forced to a candidate `t` is
//! the objective the selection module minimizes over the uncertainty region.
//!
//! The link to error probability lives in one place,
//! [`crate::detector::pe_from_metric`]; these functions only produce its
//! `metric` argument.

use crate::geometry::{nearest_ap, path_gain, Deployment, Point};
use crate::{Error, Result};

/// Evaluation context shared by the Λ metrics: the deployment, the device
/// position, the emitter set, and the slot count.
#[derive(Debug, Clone)]
pub struct MetricContext<'a> {
    deployment: &'a Deployment,
    bd: Point,
    ce_set: Vec<usize>,
    slots: usize,
}

impl<'a> MetricContext<'a> {
    pub fn new(
        deployment: &'a Deployment,
        bd: Point,
        ce_set: Vec<usize>,
        slots: usize,
    ) -> Result<Self> {
        if ce_set.is_empty() {
            return Err(Error::InvalidArgument("emitter set is empty".into()));
        }
        if slots == 0 {
            return Err(Error::InvalidArgument("slot count must be positive".into()));
        }
        let k = deployment.num_aps();
        let mut seen = vec![false; k];
        for &t in &ce_set {
            if t >= k {
                return Err(Error::InvalidArgument(format!(
                    "emitter index {t} out of range for {k} APs"
                )));
            }
            if seen[t] {
                return Err(Error::InvalidArgument(format!("duplicate emitter index {t}")));
            }
            seen[t] = true;
        }
        Ok(Self {
            deployment,
            bd,
            ce_set,
            slots,
        })
    }

    pub fn deployment(&self) -> &Deployment {
        self.deployment
    }

    pub fn bd(&self) -> Point {
        self.bd
    }

    pub fn ce_set(&self) -> &[usize] {
        &self.ce_set
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    fn gains(&self) -> Result<Vec<f64>> {
        (0..self.deployment.num_aps())
            .map(|t| path_gain(self.deployment.ap(t), self.bd))
            .collect()
    }
}

/// Rotating-emitter metric: `Λ1 = Σ_{t∈CE} Σ_{r≠t} 1/(d_r²·d_t²)`, readers
/// being all APs except the slot's own emitter. Requires `T = |CE|`.
pub fn lambda1(ctx: &MetricContext<'_>) -> Result<f64> {
    if ctx.slots != ctx.ce_set.len() {
        return Err(Error::InvalidArgument(format!(
            "rotating schedule needs one slot per emitter ({} emitters, {} slots)",
            ctx.ce_set.len(),
            ctx.slots
        )));
    }
    let gains = ctx.gains()?;
    let total: f64 = gains.iter().sum();
    Ok(ctx
        .ce_set
        .iter()
        .map(|&t| gains[t] * (total - gains[t]))
        .sum())
}

/// Nearest-emitter metric: `Λ2 = (T/d_{t′}²)·Σ_{r≠t′} 1/d_r²` where `t′` is
/// the AP nearest the evaluation point.
pub fn lambda2(ctx: &MetricContext<'_>) -> Result<f64> {
    let gains = ctx.gains()?;
    let t_prime = nearest_ap(ctx.deployment, ctx.bd);
    let others: f64 = gains
        .iter()
        .enumerate()
        .filter(|(r, _)| *r != t_prime)
        .map(|(_, g)| g)
        .sum();
    Ok(ctx.slots as f64 * gains[t_prime] * others)
}

/// Simultaneous-emitter metric: `Λ3 = Σ_{t∈CE} Σ_{r∉CE} 1/(d_r²·d_t²)`,
/// the reader set being the fixed complement of the emitter set. Requires
/// `T = |CE|` and at least one reader.
pub fn lambda3(ctx: &MetricContext<'_>) -> Result<f64> {
    if ctx.slots != ctx.ce_set.len() {
        return Err(Error::InvalidArgument(format!(
            "simultaneous schedule needs one slot per emitter ({} emitters, {} slots)",
            ctx.ce_set.len(),
            ctx.slots
        )));
    }
    if ctx.ce_set.len() >= ctx.deployment.num_aps() {
        return Err(Error::InvalidArgument(
            "emitter set covers all APs, leaving no readers".into(),
        ));
    }
    let gains = ctx.gains()?;
    let mut is_ce = vec![false; gains.len()];
    for &t in &ctx.ce_set {
        is_ce[t] = true;
    }
    let reader_sum: f64 = gains
        .iter()
        .enumerate()
        .filter(|(r, _)| !is_ce[*r])
        .map(|(_, g)| g)
        .sum();
    Ok(ctx.ce_set.iter().map(|&t| gains[t] * reader_sum).sum())
}

/// Round-trip gain of a single emitter/reader pair, `1/(d_t²·d_r²)`.
/// Symmetric in `(t, r)`: swapping the roles does not change the value.
pub fn pair_metric(dep: &Deployment, t: usize, r: usize, p: Point) -> Result<f64> {
    if t == r {
        return Err(Error::InvalidArgument(format!(
            "emitter and reader must differ (both {t})"
        )));
    }
    let k = dep.num_aps();
    if t >= k || r >= k {
        return Err(Error::InvalidArgument(format!(
            "pair ({t}, {r}) out of range for {k} APs"
        )));
    }
    Ok(path_gain(dep.ap(t), p)? * path_gain(dep.ap(r), p)?)
}

/// Received SNR of a single pair under free-space LOS:
/// `p_t·τ_d·M / (d_t²·d_r²)`.
pub fn received_snr(
    dep: &Deployment,
    t: usize,
    r: usize,
    p: Point,
    transmit_power: f64,
    slot_length: usize,
    antennas: usize,
) -> Result<f64> {
    Ok(transmit_power * slot_length as f64 * antennas as f64 * pair_metric(dep, t, r, p)?)
}
