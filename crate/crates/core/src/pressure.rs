//! Certified bounds on the pressure through the information-function
//! representation evaluated on a periodic orbit.
//!
//! For a periodic point `z` with fundamental domain `D`,
//!
//! ```text
//! P(Φ) = (1/|D|) Σ_{v ∈ D} ( -ln p(σ_v z) + A_Φ(σ_v z) )
//! ```
//!
//! where `p(x)` is the conditional probability of `x(0)` given `x` on the
//! lexicographic past. By the Markov property `p(x)` is an average, over
//! canopy configurations `δ`, of the probability of `x(0)` in the future half
//! box `S_n` given `x` on the upper layer `U_n` and `δ` on the canopy `C_n`.
//! The extreme values over `δ` bracket `p(x)`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interaction::{per_site_contribution, Configuration, Interaction, Symbol};
use crate::lattice::{boundary, canopy_decomposition, centered_box, past_in_box, Region, Site};
use crate::sft::{is_locally_admissible, PeriodicPoint};
use crate::transfer::{conditional_sum_check, Budget, ConstrainedRegion};

/// Closed real interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "[{lower}, {upper}]");
        Interval { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    /// Interval difference `{a - b : a ∈ self, b ∈ other}`.
    pub fn minus(&self, other: &Interval) -> Interval {
        Interval::new(self.lower - other.upper, self.upper - other.lower)
    }

    /// Distance from the interval to `x`, zero if `x` is inside.
    pub fn gap_to(&self, x: f64) -> f64 {
        (self.lower - x).max(x - self.upper).max(0.0)
    }
}

/// Bracket on the conditional probability of the origin symbol given the
/// past, at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PInterval {
    pub lower: f64,
    pub upper: f64,
    pub n: u32,
    /// Locally admissible canopy configurations enumerated.
    pub canopy_count: usize,
    /// Of those, the ones whose conditional denominator vanished.
    pub skipped_count: usize,
}

impl PInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Every locally admissible configuration on `region`, in canonical site
/// order, each as a symbol vector aligned with `region.iter()`.
pub fn locally_admissible_configurations(region: &Region, phi: &Interaction) -> Vec<Vec<Symbol>> {
    let sites: Vec<Site> = region.iter().collect();
    // for each position, earlier positions adjacent to it
    let earlier: Vec<Vec<usize>> = sites
        .iter()
        .enumerate()
        .map(|(i, s)| (0..i).filter(|&j| sites[j].is_adjacent(*s)).collect())
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(sites.len());
    fn go(
        sites: &[Site],
        earlier: &[Vec<usize>],
        phi: &Interaction,
        current: &mut Vec<Symbol>,
        out: &mut Vec<Vec<Symbol>>,
    ) {
        let i = current.len();
        if i == sites.len() {
            out.push(current.clone());
            return;
        }
        for a in phi.symbols() {
            let ok = earlier[i]
                .iter()
                .all(|&j| phi.edge_between(sites[i], a, sites[j], current[j]).is_finite());
            if ok {
                current.push(a);
                go(sites, earlier, phi, current, out);
                current.pop();
            }
        }
    }
    go(&sites, &earlier, phi, &mut current, &mut out);
    out
}

/// Bracket on `p(σ_v z)` from the extreme canopy conditionals at radius `n`.
pub fn p_interval(
    z: &PeriodicPoint,
    v: Site,
    n: u32,
    phi: &Interaction,
    budget: Budget,
) -> Result<PInterval> {
    assert!(n >= 1, "radius must be positive");
    let x = z.shifted(v);
    let parts = canopy_decomposition(n);
    budget.check("canopy ensemble", phi.q(), parts.canopy.len())?;
    let upper = x.window(&parts.upper);
    let target = x.at(Site::ORIGIN) as usize;
    let deltas = locally_admissible_configurations(&parts.canopy, phi);
    if deltas.is_empty() {
        return Err(Error::EmptyCanopyEnsemble);
    }
    let conditionals: Vec<Option<f64>> = deltas
        .par_iter()
        .map(|delta| -> Result<Option<f64>> {
            let canopy = Configuration::from_symbols(&parts.canopy, delta);
            let cr = ConstrainedRegion::with_boundary(parts.future.clone(), upper.concat(&canopy)?)?;
            match conditional_sum_check(&cr, Site::ORIGIN, phi) {
                Ok(dist) => Ok(Some(dist[target])),
                Err(Error::BoundaryInadmissible) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let (lower, upper_p, used) = conditionals
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY, 0usize), |(lo, hi, k), &p| {
            (lo.min(p), hi.max(p), k + 1)
        });
    if used == 0 {
        return Err(Error::EmptyCanopyEnsemble);
    }
    Ok(PInterval {
        lower,
        upper: upper_p,
        n,
        canopy_count: deltas.len(),
        skipped_count: deltas.len() - used,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiteEstimate {
    pub site: Site,
    pub p: PInterval,
    /// `A_Φ(σ_v z)`.
    pub edge_term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub model: String,
    pub n: u32,
    pub lower: f64,
    pub upper: f64,
    pub per_site: Vec<SiteEstimate>,
    pub canopy_count: usize,
    pub skipped_count: usize,
    pub wall_time_ms: f64,
}

impl PressureEstimate {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lower, self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Averages `-ln p + A_Φ` over the orbit. An upper bound on `p` gives a
/// lower bound on `-ln p` and vice versa.
pub fn assemble(per_site: &[SiteEstimate]) -> Result<Interval> {
    let count = per_site.len() as f64;
    let mut lower = 0.0;
    let mut upper = 0.0;
    for s in per_site {
        if s.p.lower <= 0.0 {
            return Err(Error::PositivityViolated(s.site));
        }
        lower += -s.p.upper.ln() + s.edge_term;
        upper += -s.p.lower.ln() + s.edge_term;
    }
    // -ln(1) can come out as -0.0
    Ok(Interval::new(lower / count + 0.0, upper / count + 0.0))
}

/// Pressure interval from the orbit of `z` at canopy radius `n`.
pub fn gk_pressure(z: &PeriodicPoint, n: u32, phi: &Interaction, budget: Budget) -> Result<PressureEstimate> {
    let start = Instant::now();
    let per_site = z
        .orbit_sites()
        .into_iter()
        .map(|v| {
            Ok(SiteEstimate {
                site: v,
                p: p_interval(z, v, n, phi, budget)?,
                edge_term: per_site_contribution(z, v, phi)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bounds = assemble(&per_site)?;
    Ok(PressureEstimate {
        model: phi.name().to_string(),
        n,
        lower: bounds.lower,
        upper: bounds.upper,
        canopy_count: per_site.iter().map(|s| s.p.canopy_count).sum(),
        skipped_count: per_site.iter().map(|s| s.p.skipped_count).sum(),
        per_site,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Difference of the pressure intervals obtained from two periodic orbits.
/// When the representation holds for both orbits it contains zero.
pub fn representation_residual(
    z: &PeriodicPoint,
    reference: &PeriodicPoint,
    n: u32,
    phi: &Interaction,
    budget: Budget,
) -> Result<Interval> {
    let a = gk_pressure(z, n, phi, budget)?;
    let b = gk_pressure(reference, n, phi, budget)?;
    Ok(a.interval().minus(&b.interval()))
}

/// Certified lower bound on `inf_S p_S(σ_v z)` over orbit sites `v` and all
/// subsets `S` of the past inside `[-r, r]²`, `r = min(2, n - 1)`. Each
/// `p_S` is an average over boundary conditions on `∂[-n, n]²`, so the
/// smallest such conditional bounds it from below.
pub fn finite_positivity_probe(z: &PeriodicPoint, n: u32, phi: &Interaction, budget: Budget) -> Result<f64> {
    assert!(n >= 1, "radius must be positive");
    let inner = n.saturating_sub(1).min(2);
    let past: Vec<Site> = past_in_box(inner).iter().collect();
    let square = centered_box(n);
    let ring = boundary(&square);
    budget.check("positivity probe boundary", phi.q(), ring.len())?;
    let deltas = locally_admissible_configurations(&ring, phi);
    budget.check_count(
        "positivity probe conditionals",
        deltas.len() as f64 * 2f64.powi(past.len() as i32),
    )?;
    let mut best = f64::INFINITY;
    for v in z.orbit_sites() {
        let x = z.shifted(v);
        let target = x.at(Site::ORIGIN) as usize;
        let subset_minima: Vec<Result<f64>> = (0u32..1 << past.len())
            .into_par_iter()
            .map(|mask| {
                let mut lowest = f64::INFINITY;
                for delta in &deltas {
                    let mut cr = ConstrainedRegion::with_boundary(
                        square.clone(),
                        Configuration::from_symbols(&ring, delta),
                    )?;
                    for (k, s) in past.iter().enumerate() {
                        if mask & (1 << k) != 0 {
                            cr.pin(*s, x.at(*s))?;
                        }
                    }
                    match conditional_sum_check(&cr, Site::ORIGIN, phi) {
                        Ok(dist) => lowest = lowest.min(dist[target]),
                        Err(Error::BoundaryInadmissible) => {}
                        Err(e) => return Err(e),
                    }
                }
                Ok(lowest)
            })
            .collect();
        for m in subset_minima {
            best = best.min(m?);
        }
    }
    if best == f64::INFINITY {
        return Err(Error::EmptyCanopyEnsemble);
    }
    Ok(best)
}

/// Attempts allowed per connected boundary component when rejection
/// sampling a locally admissible boundary condition.
pub const SAMPLING_ATTEMPTS: usize = 1_000_000;

/// Uniform sample from the locally admissible configurations on `region`.
/// Components are sampled independently: constraints never cross them.
pub fn sample_locally_admissible(
    region: &Region,
    phi: &Interaction,
    rng: &mut impl Rng,
) -> Result<Configuration> {
    let mut out = Configuration::new();
    for comp in region.components() {
        let mut attempts = 0;
        let accepted = loop {
            if attempts == SAMPLING_ATTEMPTS {
                return Err(Error::SamplingFailed(format!(
                    "no admissible configuration on a component of {} sites after {attempts} attempts",
                    comp.len()
                )));
            }
            attempts += 1;
            let candidate: Configuration = comp
                .iter()
                .map(|s| (s, rng.gen_range(0..phi.q()) as Symbol))
                .collect();
            if is_locally_admissible(&candidate, phi) {
                break candidate;
            }
        };
        out = out.concat(&accepted)?;
    }
    Ok(out)
}

/// Largest observed `|μ^δ(0 ↦ a) - μ^δ'(0 ↦ a)|` over `trials` random pairs
/// of boundary conditions on `∂[-n, n]²`. Diagnostic only.
pub fn ssm_gap_probe(n: u32, phi: &Interaction, trials: usize, seed: u64) -> Result<f64> {
    let square = centered_box(n);
    let ring = boundary(&square);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Result<Vec<f64>> {
        for _ in 0..SAMPLING_ATTEMPTS {
            let delta = sample_locally_admissible(&ring, phi, rng)?;
            let cr = ConstrainedRegion::with_boundary(square.clone(), delta)?;
            match conditional_sum_check(&cr, Site::ORIGIN, phi) {
                Ok(d) => return Ok(d),
                Err(Error::BoundaryInadmissible) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::SamplingFailed("no boundary condition with positive weight".into()))
    };
    let mut gap: f64 = 0.0;
    for _ in 0..trials {
        let a = draw(&mut rng)?;
        let b = draw(&mut rng)?;
        for (p, q) in a.iter().zip(&b) {
            gap = gap.max((p - q).abs());
        }
    }
    Ok(gap)
}

/// One row of a convergence study over radii.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StudyRow {
    pub n: u32,
    pub result: std::result::Result<Interval, String>,
    pub time_ms: f64,
}

pub fn convergence_study(
    z: &PeriodicPoint,
    radii: impl IntoIterator<Item = u32>,
    phi: &Interaction,
    budget: Budget,
) -> Vec<StudyRow> {
    radii
        .into_iter()
        .map(|n| {
            let start = Instant::now();
            let result = gk_pressure(z, n, phi, budget)
                .map(|e| e.interval())
                .map_err(|e| e.to_string());
            StudyRow {
                n,
                result,
                time_ms: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect()
}

/// Least-squares slope and intercept of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Fitted decay rate of `ln(width)` in `n` over the successful rows with
/// positive width.
pub fn log_width_slope(rows: &[StudyRow]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok().map(|i| (r.n as f64, i.width())))
        .filter(|(_, w)| *w > 0.0)
        .map(|(n, w)| (n, w.ln()))
        .unzip();
    linear_fit(&xs, &ys).map(|(slope, _)| slope)
}
