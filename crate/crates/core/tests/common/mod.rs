//! Brute-force reference computations shared by the integration tests.
#![allow(dead_code)]

use gpress::interaction::energy_with_boundary;
use gpress::lattice::canopy_decomposition;
use gpress::sft::is_locally_admissible;
use gpress::transfer::log_sum_exp;
use gpress::{Configuration, Interaction, PeriodicPoint, Region, Site, Symbol};

pub fn gallery() -> Vec<Interaction> {
    let mut out = Vec::new();
    for lambda in [0.5, 1.0, 2.0] {
        out.push(Interaction::hard_square(lambda).unwrap());
    }
    for k in [2, 3, 5] {
        out.push(Interaction::checkerboard(k).unwrap());
    }
    for beta in [0.0, 0.3] {
        out.push(Interaction::ising(beta).unwrap());
    }
    out
}

/// Calls `f` on every configuration in `A^region`.
pub fn for_each_configuration(region: &Region, q: usize, mut f: impl FnMut(&Configuration)) {
    let sites: Vec<Site> = region.iter().collect();
    let mut digits = vec![0 as Symbol; sites.len()];
    loop {
        f(&Configuration::from_symbols(region, &digits));
        let mut i = 0;
        loop {
            if i == digits.len() {
                return;
            }
            digits[i] += 1;
            if (digits[i] as usize) < q {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// `ln Σ_w e^{-U(w δ)}` over configurations agreeing with `pins`.
pub fn brute_log_partition(
    region: &Region,
    delta: &Configuration,
    pins: &Configuration,
    phi: &Interaction,
) -> f64 {
    let mut terms = Vec::new();
    for_each_configuration(region, phi.q(), |w| {
        if pins.iter().all(|(s, a)| w.get(s) == Some(a)) {
            let u = energy_with_boundary(w, delta, phi).unwrap();
            if u.is_finite() {
                terms.push(-u);
            }
        }
    });
    log_sum_exp(&terms)
}

/// `μ^δ(pins)`, or `None` when `Z^δ = 0`.
pub fn brute_conditional(
    region: &Region,
    delta: &Configuration,
    pins: &Configuration,
    phi: &Interaction,
) -> Option<f64> {
    let den = brute_log_partition(region, delta, &Configuration::new(), phi);
    if den == f64::NEG_INFINITY {
        return None;
    }
    Some((brute_log_partition(region, delta, pins, phi) - den).exp())
}

/// Conditionals of `{0 ↦ x(0)}` on the half box, `x = σ_v z`, for every
/// locally admissible canopy configuration with a positive denominator.
pub fn brute_canopy_conditionals(z: &PeriodicPoint, v: Site, n: u32, phi: &Interaction) -> Vec<f64> {
    let d = canopy_decomposition(n);
    let x = z.shifted(v);
    let upper = x.window(&d.upper);
    let target: Configuration = [(Site::ORIGIN, x.at(Site::ORIGIN))].into_iter().collect();
    let mut out = Vec::new();
    for_each_configuration(&d.canopy, phi.q(), |delta| {
        if is_locally_admissible(delta, phi) {
            let boundary = upper.concat(delta).unwrap();
            if let Some(p) = brute_conditional(&d.future, &boundary, &target, phi) {
                out.push(p);
            }
        }
    });
    out
}

/// Some locally admissible configuration on `region`, chosen greedily in
/// canonical order with a preference rotated by `seed`.
pub fn greedy_admissible(region: &Region, phi: &Interaction, seed: usize) -> Option<Configuration> {
    let mut out = Configuration::new();
    for (i, s) in region.iter().enumerate() {
        let q = phi.q();
        let a = (0..q)
            .map(|k| ((k + seed + i) % q) as Symbol)
            .find(|&a| {
                s.neighbors().iter().all(|nb| match out.get(*nb) {
                    Some(b) => phi.edge_between(s, a, *nb, b).is_finite(),
                    None => true,
                })
            })?;
        out.insert(s, a);
    }
    Some(out)
}

/// Finite-valued interaction with energies uniform in `[-2, 2)`.
pub fn random_interaction(q: usize, rng: &mut impl rand::Rng) -> Interaction {
    let mut table = || (0..q * q).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<f64>>();
    let h = table();
    let v = table();
    Interaction::new("random", gpress::interaction::Alphabet::new(q).unwrap(), h, v).unwrap()
}

/// Rectangles of area ≤ 12, the half box at radius 1, and seeded random
/// (often disconnected) subsets of a 4x4 square of every size up to 12.
pub fn small_regions(seed: u64) -> Vec<Region> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut out = Vec::new();
    for w in 1..=12 {
        for h in 1..=12 / w {
            out.push(Region::rectangle(0, w - 1, 0, h - 1));
        }
    }
    out.push(canopy_decomposition(1).future);
    let square: Vec<Site> = Region::rectangle(0, 3, 0, 3).iter().collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for size in 1..=12 {
        for _ in 0..3 {
            out.push(square.choose_multiple(&mut rng, size).copied().collect());
        }
    }
    out
}

/// Largest `|log_partition - brute force|` over `regions` with at most
/// `max_terms` configurations, each tried free and with a random partial
/// boundary plus one pinned site. Returns the error and the number of
/// comparisons made.
pub fn oracle_sweep(phi: &Interaction, regions: &[Region], max_terms: usize, seed: u64) -> (f64, usize) {
    use gpress::lattice::boundary;
    use gpress::transfer::log_partition;
    use gpress::ConstrainedRegion;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let q = phi.q();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut compare = |a: f64, b: f64| {
        count += 1;
        if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
            return;
        }
        worst = worst.max((a - b).abs());
    };
    for region in regions {
        if (q as f64).powi(region.len() as i32) > max_terms as f64 {
            continue;
        }
        let empty = Configuration::new();
        let dp = log_partition(&ConstrainedRegion::free(region.clone()), phi).ln();
        compare(dp, brute_log_partition(region, &empty, &empty, phi));

        let mut delta = Configuration::new();
        for s in boundary(region).iter() {
            if rng.gen_bool(0.6) {
                delta.insert(s, rng.gen_range(0..q) as Symbol);
            }
        }
        let pin_site = region.iter().nth(rng.gen_range(0..region.len())).unwrap();
        let pins: Configuration = [(pin_site, rng.gen_range(0..q) as Symbol)].into_iter().collect();
        let mut cr = ConstrainedRegion::with_boundary(region.clone(), delta.clone()).unwrap();
        cr.pin(pin_site, pins.get(pin_site).unwrap()).unwrap();
        compare(log_partition(&cr, phi).ln(), brute_log_partition(region, &delta, &pins, phi));
    }
    (worst, count)
}

/// Boundary conditions on `∂[-1, 1]²` used for the Gibbs identity: windows
/// of admissible periodic patterns, plus a random one for models without
/// forbidden edges.
pub fn pinned_boundaries(phi: &Interaction, seed: u64) -> Vec<Configuration> {
    use gpress::lattice::{boundary, centered_box};
    use rand::{Rng, SeedableRng};
    let ring = boundary(&centered_box(1));
    let q = phi.q() as i32;
    let patterns: [&dyn Fn(Site) -> i32; 3] = [
        &|_| 0,
        &|s: Site| (s.x + s.y).rem_euclid(2),
        &|s: Site| (s.x - s.y).rem_euclid(3),
    ];
    let mut out: Vec<Configuration> = patterns
        .iter()
        .map(|f| ring.iter().map(|s| (s, f(s).min(q - 1) as Symbol)).collect::<Configuration>())
        .filter(|c| is_locally_admissible(c, phi))
        .collect();
    if !phi.has_forbidden_edges() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        out.push(ring.iter().map(|s| (s, rng.gen_range(0..q) as Symbol)).collect());
    }
    out
}

#[derive(Debug, Default, Clone, Copy)]
pub struct GibbsReport {
    /// Largest `|DP - e^{-U(wδ)}/Z|` over the checked joint configurations.
    pub joint_error: f64,
    /// Largest site-marginal discrepancy against the enumerated Gibbs law.
    pub marginal_error: f64,
    /// Largest `|Σ_a p(a) - 1|` of the DP site distributions.
    pub sum_error: f64,
    pub joint_checked: usize,
}

/// Compares DP conditionals on `[-1, 1]²` with the Gibbs formula evaluated
/// by enumeration. At most about `max_joint` joint events go through the DP.
pub fn gibbs_identity(phi: &Interaction, delta: &Configuration, max_joint: usize) -> GibbsReport {
    use gpress::lattice::centered_box;
    use gpress::transfer::{conditional_probability, conditional_sum_check};
    use gpress::ConstrainedRegion;
    let region = centered_box(1);
    let sites: Vec<Site> = region.iter().collect();
    let q = phi.q();
    let mut configs = Vec::new();
    let mut log_weights = Vec::new();
    for_each_configuration(&region, q, |w| {
        configs.push(w.clone());
        log_weights.push(-energy_with_boundary(w, delta, phi).unwrap());
    });
    let log_z = log_sum_exp(&log_weights);
    assert!(log_z.is_finite(), "boundary admits no configuration");
    let cr = ConstrainedRegion::with_boundary(region.clone(), delta.clone()).unwrap();
    let mut report = GibbsReport::default();
    let stride = (configs.len() / max_joint).max(1);
    for (i, (w, lw)) in configs.iter().zip(&log_weights).enumerate() {
        if i % stride == 0 {
            let direct = (lw - log_z).exp();
            let dp = conditional_probability(w, &cr, phi).unwrap();
            report.joint_error = report.joint_error.max((dp - direct).abs());
            report.joint_checked += 1;
        }
    }
    for (k, &s) in sites.iter().enumerate() {
        let dist = conditional_sum_check(&cr, s, phi).unwrap();
        report.sum_error = report.sum_error.max((dist.iter().sum::<f64>() - 1.0).abs());
        let mut marginal = vec![Vec::new(); q];
        for (w, lw) in configs.iter().zip(&log_weights) {
            marginal[w.get(sites[k]).unwrap() as usize].push(*lw);
        }
        for (a, terms) in marginal.iter().enumerate() {
            let direct = (log_sum_exp(terms) - log_z).exp();
            report.marginal_error = report.marginal_error.max((dist[a] - direct).abs());
        }
    }
    report
}
