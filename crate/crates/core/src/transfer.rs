//! Exact partition functions on finite regions by row-sweep dynamic
//! programming, conditional probabilities derived from them, and the
//! row-to-row transfer operator of free-boundary strips.
//!
//! Everything is carried in the natural-log domain: a weight `e^{-U}` is
//! stored as `-U`, a zero weight as `-∞`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interaction::{Configuration, Interaction, Symbol};
use crate::lattice::{boundary, Region, Site};

/// Natural log of a nonnegative weight.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct LogWeight(f64);

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    pub const ONE: LogWeight = LogWeight(0.0);

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan() && ln != f64::INFINITY);
        LogWeight(ln)
    }

    /// The weight `e^{-energy}`; `+∞` energy gives [`LogWeight::ZERO`].
    pub fn from_energy(energy: f64) -> Self {
        LogWeight(-energy)
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Exponentiates; only for reporting.
    pub fn value(self) -> f64 {
        self.0.exp()
    }
}

impl Add for LogWeight {
    type Output = LogWeight;

    fn add(self, rhs: LogWeight) -> LogWeight {
        LogWeight(log_add(self.0, rhs.0))
    }
}

/// Product of weights: logs add.
impl Mul for LogWeight {
    type Output = LogWeight;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: LogWeight) -> LogWeight {
        LogWeight(self.0 + rhs.0)
    }
}

impl std::iter::Sum for LogWeight {
    fn sum<I: Iterator<Item = LogWeight>>(iter: I) -> LogWeight {
        let values: Vec<f64> = iter.map(|w| w.0).collect();
        LogWeight(log_sum_exp(&values))
    }
}

#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// `ln Σ e^{x_i}`, `-∞` for an empty or all `-∞` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// A finite region with per-site allowed symbols and a fixed configuration
/// on (part of) its exterior boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstrainedRegion {
    region: Region,
    allowed: BTreeMap<Site, Vec<Symbol>>,
    boundary: Configuration,
}

impl ConstrainedRegion {
    /// Free boundary, every symbol allowed.
    pub fn free(region: Region) -> Self {
        ConstrainedRegion {
            region,
            allowed: BTreeMap::new(),
            boundary: Configuration::new(),
        }
    }

    /// `boundary` must live on sites of `∂region`.
    pub fn with_boundary(region: Region, boundary_config: Configuration) -> Result<Self> {
        let ring = boundary(&region);
        if let Some((s, _)) = boundary_config.iter().find(|(s, _)| !ring.contains(*s)) {
            return Err(Error::InvalidRegion(format!(
                "boundary site {s} is not on the exterior boundary"
            )));
        }
        Ok(ConstrainedRegion {
            region,
            allowed: BTreeMap::new(),
            boundary: boundary_config,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn boundary(&self) -> &Configuration {
        &self.boundary
    }

    /// Does the boundary configuration cover all of `∂region`?
    pub fn has_full_boundary(&self) -> bool {
        boundary(&self.region) == self.boundary.region()
    }

    /// Restricts `site` to the symbols in `symbols`.
    pub fn restrict(&mut self, site: Site, symbols: &[Symbol]) -> Result<()> {
        if !self.region.contains(site) {
            return Err(Error::InvalidRegion(format!("{site} is not in the region")));
        }
        let current = self.allowed.get(&site);
        let next: Vec<Symbol> = symbols
            .iter()
            .copied()
            .filter(|a| current.is_none_or(|c| c.contains(a)))
            .collect();
        if next.is_empty() {
            return Err(Error::InvalidRegion(format!("no symbol left at {site}")));
        }
        self.allowed.insert(site, next);
        Ok(())
    }

    pub fn pin(&mut self, site: Site, a: Symbol) -> Result<()> {
        self.restrict(site, &[a])
    }

    /// Copy with every site of `event` pinned. A symbol that is already
    /// excluded at its site makes the event impossible: `Ok(None)`.
    pub fn pinned(&self, event: &Configuration) -> Result<Option<Self>> {
        let mut out = self.clone();
        for (s, a) in event.iter() {
            if !self.region.contains(s) {
                return Err(Error::InvalidRegion(format!("event site {s} is outside the region")));
            }
            if !self.allowed.get(&s).is_none_or(|set| set.contains(&a)) {
                return Ok(None);
            }
            out.allowed.insert(s, vec![a]);
        }
        Ok(Some(out))
    }

    fn symbols_at(&self, site: Site, q: usize) -> Vec<Symbol> {
        match self.allowed.get(&site) {
            Some(set) => set.iter().copied().filter(|&a| (a as usize) < q).collect(),
            None => (0..q).map(|a| a as Symbol).collect(),
        }
    }
}

/// All admissible assignments of one row of the region.
struct RowLayer {
    y: i32,
    xs: Vec<i32>,
    /// Flattened states, `xs.len()` symbols each.
    states: Vec<Symbol>,
    /// `-(energy of edges inside the row and from the row to the boundary)`.
    self_weight: Vec<f64>,
}

impl RowLayer {
    fn width(&self) -> usize {
        self.xs.len()
    }

    fn len(&self) -> usize {
        self.self_weight.len()
    }

    fn state(&self, i: usize) -> &[Symbol] {
        let w = self.width();
        &self.states[i * w..(i + 1) * w]
    }

    fn build(y: i32, xs: Vec<i32>, cr: &ConstrainedRegion, phi: &Interaction) -> RowLayer {
        let q = phi.q();
        let options: Vec<Vec<Symbol>> = xs.iter().map(|&x| cr.symbols_at(Site::new(x, y), q)).collect();
        // Per-position energy of each candidate symbol against the boundary.
        let boundary_energy: Vec<Vec<f64>> = xs
            .iter()
            .zip(&options)
            .map(|(&x, opts)| {
                let site = Site::new(x, y);
                opts.iter()
                    .map(|&a| {
                        site.neighbors()
                            .iter()
                            .filter_map(|&nb| cr.boundary.get(nb).map(|b| phi.edge_between(site, a, nb, b)))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let mut layer = RowLayer {
            y,
            xs,
            states: Vec::new(),
            self_weight: Vec::new(),
        };
        let mut current = Vec::with_capacity(layer.width());
        layer.extend(&options, &boundary_energy, phi, &mut current, 0.0);
        layer
    }

    fn extend(
        &mut self,
        options: &[Vec<Symbol>],
        boundary_energy: &[Vec<f64>],
        phi: &Interaction,
        current: &mut Vec<Symbol>,
        energy: f64,
    ) {
        let pos = current.len();
        if pos == self.width() {
            self.states.extend_from_slice(current);
            self.self_weight.push(-energy);
            return;
        }
        let joined_left = pos > 0 && self.xs[pos - 1] + 1 == self.xs[pos];
        for (k, &a) in options[pos].iter().enumerate() {
            let mut e = energy + boundary_energy[pos][k];
            if joined_left {
                e += phi.horizontal(current[pos - 1], a);
            }
            if e == f64::INFINITY {
                continue;
            }
            current.push(a);
            self.extend(options, boundary_energy, phi, current, e);
            current.pop();
        }
    }
}

/// Index pairs `(position in lower row, position in upper row)` joined by a
/// vertical edge.
fn vertical_pairs(lower: &RowLayer, upper: &RowLayer) -> Vec<(usize, usize)> {
    if upper.y != lower.y + 1 {
        return Vec::new();
    }
    lower
        .xs
        .iter()
        .enumerate()
        .filter_map(|(i, x)| upper.xs.binary_search(x).ok().map(|j| (i, j)))
        .collect()
}

#[inline]
fn vertical_energy(phi: &Interaction, pairs: &[(usize, usize)], s: &[Symbol], t: &[Symbol]) -> f64 {
    let mut e = 0.0;
    for &(i, j) in pairs {
        e += phi.vertical(s[i], t[j]);
        if e == f64::INFINITY {
            break;
        }
    }
    e
}

/// How messages cross from one row to the next.
enum Coupling {
    /// Rows not vertically adjacent: messages factorize.
    None,
    /// Loop over all state pairs.
    Pairwise(Vec<(usize, usize)>),
    /// Per-column log-domain transforms of a dense tensor over `q^width`
    /// row assignments; cheaper when rows have many states.
    Dense,
}

/// Row-major index of a row assignment in the dense `q^width` tensor.
fn dense_index(state: &[Symbol], q: usize) -> usize {
    state.iter().fold(0, |acc, &a| acc * q + a as usize)
}

/// Log-domain `out[.., b, ..] = ln Σ_a exp(t[.., a, ..] + m(a, b))` along the
/// axis at `pos` of a tensor with `axes` axes of length `q`. With `m = None`
/// the axis is summed out instead.
fn contract_axis(t: &[f64], q: usize, axes: usize, pos: usize, m: Option<&dyn Fn(usize, usize) -> f64>) -> Vec<f64> {
    let stride = q.pow((axes - pos - 1) as u32);
    let outer = t.len() / (q * stride);
    let out_q = if m.is_some() { q } else { 1 };
    let mut out = vec![f64::NEG_INFINITY; outer * out_q * stride];
    let mut terms = vec![0.0; q];
    for o in 0..outer {
        for b in 0..out_q {
            for i in 0..stride {
                for (a, term) in terms.iter_mut().enumerate() {
                    let w = t[(o * q + a) * stride + i];
                    *term = match m {
                        Some(m) => w + m(a, b),
                        None => w,
                    };
                }
                out[(o * out_q + b) * stride + i] = log_sum_exp(&terms);
            }
        }
    }
    out
}

/// New axis of length `q` at `pos`, constant along it.
fn insert_axis(t: &[f64], q: usize, axes: usize, pos: usize) -> Vec<f64> {
    let stride = q.pow((axes - pos) as u32);
    let outer = t.len() / stride;
    let mut out = Vec::with_capacity(t.len() * q);
    for o in 0..outer {
        let block = &t[o * stride..(o + 1) * stride];
        for _ in 0..q {
            out.extend_from_slice(block);
        }
    }
    out
}

/// Moves a dense message over the columns `from` to the columns `to`:
/// shared columns go through `m` (`m(a, b)` with `a` on the `from` side),
/// columns only in `from` are summed out, columns only in `to` are free.
fn transport(mut t: Vec<f64>, q: usize, from: &[i32], to: &[i32], m: &dyn Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut cols = from.to_vec();
    for x in from {
        let pos = cols.iter().position(|c| c == x).expect("column present");
        if to.binary_search(x).is_ok() {
            t = contract_axis(&t, q, cols.len(), pos, Some(m));
        } else {
            t = contract_axis(&t, q, cols.len(), pos, None);
            cols.remove(pos);
        }
    }
    for x in to {
        if let Err(pos) = cols.binary_search(x) {
            t = insert_axis(&t, q, cols.len(), pos);
            cols.insert(pos, *x);
        }
    }
    t
}

/// Row-by-row factorization of a constrained region.
struct Sweep<'a> {
    phi: &'a Interaction,
    layers: Vec<RowLayer>,
    couplings: Vec<Coupling>,
}

impl<'a> Sweep<'a> {
    fn new(cr: &ConstrainedRegion, phi: &'a Interaction) -> Self {
        let layers: Vec<RowLayer> = cr
            .region
            .rows()
            .into_iter()
            .map(|(y, xs)| RowLayer::build(y, xs, cr, phi))
            .collect();
        let q = phi.q() as f64;
        let couplings = layers
            .windows(2)
            .map(|w| {
                let pairs = vertical_pairs(&w[0], &w[1]);
                if pairs.is_empty() {
                    return Coupling::None;
                }
                let widest = w[0].width().max(w[1].width()) as i32;
                let dense_cost = q.powi(widest + 1) * (w[0].width() + w[1].width()) as f64;
                let pair_cost = (w[0].len() * w[1].len() * pairs.len()) as f64;
                if dense_cost < pair_cost && q.powi(widest) <= (1u64 << 22) as f64 {
                    Coupling::Dense
                } else {
                    Coupling::Pairwise(pairs)
                }
            })
            .collect();
        Sweep {
            phi,
            layers,
            couplings,
        }
    }

    fn vertical_log_weight(&self) -> impl Fn(usize, usize) -> f64 + '_ {
        |a, b| -self.phi.vertical(a as Symbol, b as Symbol)
    }

    /// Message into `upper` given log weights `alpha` on `lower`'s states.
    fn push_up(&self, i: usize, alpha: &[f64]) -> Vec<f64> {
        let (lower, upper) = (&self.layers[i], &self.layers[i + 1]);
        match &self.couplings[i] {
            Coupling::None => vec![log_sum_exp(alpha); upper.len()],
            Coupling::Pairwise(pairs) => {
                let live: Vec<usize> = (0..lower.len()).filter(|&s| alpha[s] > f64::NEG_INFINITY).collect();
                let mut terms = Vec::with_capacity(live.len());
                (0..upper.len())
                    .map(|t| {
                        terms.clear();
                        let ts = upper.state(t);
                        for &s in &live {
                            let e = vertical_energy(self.phi, pairs, lower.state(s), ts);
                            if e < f64::INFINITY {
                                terms.push(alpha[s] - e);
                            }
                        }
                        log_sum_exp(&terms)
                    })
                    .collect()
            }
            Coupling::Dense => {
                let q = self.phi.q();
                let mut t = vec![f64::NEG_INFINITY; q.pow(lower.width() as u32)];
                for (s, &w) in alpha.iter().enumerate() {
                    t[dense_index(lower.state(s), q)] = w;
                }
                let m = self.vertical_log_weight();
                let t = transport(t, q, &lower.xs, &upper.xs, &m);
                (0..upper.len()).map(|u| t[dense_index(upper.state(u), q)]).collect()
            }
        }
    }

    /// Message into `lower` given log weights `w` on `upper`'s states.
    fn push_down(&self, i: usize, w: &[f64]) -> Vec<f64> {
        let (lower, upper) = (&self.layers[i], &self.layers[i + 1]);
        match &self.couplings[i] {
            Coupling::None => vec![log_sum_exp(w); lower.len()],
            Coupling::Pairwise(pairs) => {
                let live: Vec<usize> = (0..upper.len()).filter(|&t| w[t] > f64::NEG_INFINITY).collect();
                let mut terms = Vec::with_capacity(live.len());
                (0..lower.len())
                    .map(|s| {
                        terms.clear();
                        let ss = lower.state(s);
                        for &t in &live {
                            let e = vertical_energy(self.phi, pairs, ss, upper.state(t));
                            if e < f64::INFINITY {
                                terms.push(w[t] - e);
                            }
                        }
                        log_sum_exp(&terms)
                    })
                    .collect()
            }
            Coupling::Dense => {
                let q = self.phi.q();
                let mut t = vec![f64::NEG_INFINITY; q.pow(upper.width() as u32)];
                for (u, &v) in w.iter().enumerate() {
                    t[dense_index(upper.state(u), q)] = v;
                }
                let m = self.vertical_log_weight();
                let flipped = |b: usize, a: usize| m(a, b);
                let t = transport(t, q, &upper.xs, &lower.xs, &flipped);
                (0..lower.len()).map(|s| t[dense_index(lower.state(s), q)]).collect()
            }
        }
    }

    /// Forward messages up to and including layer `last`.
    fn forward(&self, last: usize) -> Vec<f64> {
        let mut alpha = self.layers[0].self_weight.clone();
        for i in 1..=last {
            let incoming = self.push_up(i - 1, &alpha);
            alpha = incoming
                .iter()
                .zip(&self.layers[i].self_weight)
                .map(|(m, w)| m + w)
                .collect();
        }
        alpha
    }

    /// Backward messages down to layer `first`, excluding that layer's own
    /// weight.
    fn backward(&self, first: usize) -> Vec<f64> {
        let top = self.layers.len() - 1;
        let mut beta = vec![0.0; self.layers[top].len()];
        for i in (first..top).rev() {
            let w: Vec<f64> = self.layers[i + 1]
                .self_weight
                .iter()
                .zip(&beta)
                .map(|(s, b)| s + b)
                .collect();
            beta = self.push_down(i, &w);
        }
        beta
    }

    fn log_partition(&self) -> LogWeight {
        if self.layers.is_empty() {
            return LogWeight::ONE;
        }
        LogWeight(log_sum_exp(&self.forward(self.layers.len() - 1)))
    }

    /// Unnormalized log-marginal of each symbol at `site`.
    fn site_log_weights(&self, site: Site) -> Vec<f64> {
        let q = self.phi.q();
        let row = self
            .layers
            .iter()
            .position(|l| l.y == site.y)
            .expect("site belongs to the region");
        let pos = self.layers[row]
            .xs
            .binary_search(&site.x)
            .expect("site belongs to the region");
        let alpha = self.forward(row);
        let beta = self.backward(row);
        let layer = &self.layers[row];
        let mut by_symbol: Vec<Vec<f64>> = vec![Vec::new(); q];
        for s in 0..layer.len() {
            by_symbol[layer.state(s)[pos] as usize].push(alpha[s] + beta[s]);
        }
        by_symbol.iter().map(|v| log_sum_exp(v)).collect()
    }
}

/// `ln Σ_w e^{-U(w δ)}` over configurations `w` respecting the allowed sets,
/// counting edges inside the region and edges from the region to the fixed
/// boundary. [`LogWeight::ZERO`] when nothing is admissible.
pub fn log_partition(cr: &ConstrainedRegion, phi: &Interaction) -> LogWeight {
    Sweep::new(cr, phi).log_partition()
}

fn require_full_boundary(cr: &ConstrainedRegion) -> Result<()> {
    if cr.has_full_boundary() {
        Ok(())
    } else {
        Err(Error::InvalidRegion(
            "conditional probabilities need a boundary covering the whole exterior boundary".into(),
        ))
    }
}

/// Gibbs probability of `event` (a pinning of some region sites) given the
/// region's boundary condition.
pub fn conditional_probability(
    event: &Configuration,
    cr: &ConstrainedRegion,
    phi: &Interaction,
) -> Result<f64> {
    require_full_boundary(cr)?;
    let den = log_partition(cr, phi);
    if den.is_zero() {
        return Err(Error::BoundaryInadmissible);
    }
    let num = match cr.pinned(event)? {
        Some(pinned) => log_partition(&pinned, phi),
        None => LogWeight::ZERO,
    };
    Ok((num.ln() - den.ln()).exp())
}

/// Distribution of the symbol at `site` given the region's boundary.
pub fn conditional_sum_check(cr: &ConstrainedRegion, site: Site, phi: &Interaction) -> Result<Vec<f64>> {
    require_full_boundary(cr)?;
    if !cr.region.contains(site) {
        return Err(Error::InvalidRegion(format!("{site} is not in the region")));
    }
    let weights = Sweep::new(cr, phi).site_log_weights(site);
    let total = log_sum_exp(&weights);
    if total == f64::NEG_INFINITY {
        return Err(Error::BoundaryInadmissible);
    }
    Ok(weights.iter().map(|w| (w - total).exp()).collect())
}

/// Memory/time guard for exponential state spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub limit: u64,
}

impl Budget {
    pub const DEFAULT_LIMIT: u64 = 1 << 24;

    pub fn new(limit: u64) -> Self {
        Budget { limit }
    }

    /// Fails if `base^exponent` exceeds the limit.
    pub fn check(&self, what: &'static str, base: usize, exponent: usize) -> Result<()> {
        self.check_count(what, (base as f64).powi(exponent as i32))
    }

    pub fn check_count(&self, what: &'static str, required: f64) -> Result<()> {
        if required > self.limit as f64 {
            Err(Error::BudgetExceeded {
                what,
                required,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Budget::DEFAULT_LIMIT)
    }
}

/// Sparse row-to-row transfer operator of a free-boundary strip of width `m`,
/// in log form: `T(s, t) = e^{-E_v(s, t) - E_h(t)}`.
pub struct StripOperator {
    /// CSR layout over admissible rows.
    offsets: Vec<usize>,
    targets: Vec<u32>,
    log_weights: Vec<f64>,
}

impl StripOperator {
    pub fn build(width: usize, phi: &Interaction, budget: Budget) -> Result<Self> {
        assert!(width >= 1);
        budget.check("strip row states", phi.q(), width)?;
        let xs: Vec<i32> = (0..width as i32).collect();
        let row = RowLayer::build(0, xs.clone(), &ConstrainedRegion::free(Region::new()), phi);
        let pairs: Vec<(usize, usize)> = (0..width).map(|i| (i, i)).collect();
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        let mut log_weights = Vec::new();
        for s in 0..row.len() {
            let ss = row.state(s);
            for t in 0..row.len() {
                let e = vertical_energy(phi, &pairs, ss, row.state(t));
                if e < f64::INFINITY {
                    targets.push(t as u32);
                    log_weights.push(row.self_weight[t] - e);
                }
            }
            offsets.push(targets.len());
            // a lower bound on the final size once it trips
            budget.check_count("strip transfer entries", targets.len() as f64)?;
        }
        let mut op = StripOperator {
            offsets,
            targets,
            log_weights,
        };
        op.prune();
        Ok(op)
    }

    pub fn states(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn nonzeros(&self) -> usize {
        self.targets.len()
    }

    /// Drops rows with no successor or no predecessor until none remain, so
    /// power iterates stay strictly positive.
    fn prune(&mut self) {
        loop {
            let n = self.states();
            let mut has_pred = vec![false; n];
            for &t in &self.targets {
                has_pred[t as usize] = true;
            }
            let keep: Vec<bool> = (0..n)
                .map(|s| has_pred[s] && self.offsets[s + 1] > self.offsets[s])
                .collect();
            if keep.iter().all(|&k| k) {
                return;
            }
            let mut new_index = vec![u32::MAX; n];
            let mut next = 0u32;
            for s in 0..n {
                if keep[s] {
                    new_index[s] = next;
                    next += 1;
                }
            }
            let mut offsets = vec![0];
            let mut targets = Vec::new();
            let mut log_weights = Vec::new();
            for s in (0..n).filter(|&s| keep[s]) {
                for k in self.offsets[s]..self.offsets[s + 1] {
                    let t = self.targets[k] as usize;
                    if keep[t] {
                        targets.push(new_index[t]);
                        log_weights.push(self.log_weights[k]);
                    }
                }
                offsets.push(targets.len());
            }
            self.offsets = offsets;
            self.targets = targets;
            self.log_weights = log_weights;
        }
    }

    fn apply(&self, v: &[f64], out: &mut [f64], terms: &mut Vec<f64>) {
        for (s, o) in out.iter_mut().enumerate() {
            terms.clear();
            for k in self.offsets[s]..self.offsets[s + 1] {
                terms.push(self.log_weights[k] + v[self.targets[k] as usize]);
            }
            *o = log_sum_exp(terms);
        }
    }

    /// Power iteration from the all-ones vector with Collatz–Wielandt
    /// bounds on `ln λ_max`.
    pub fn spectral_bounds(&self, tolerance: f64, max_iterations: usize) -> SpectralBounds {
        let n = self.states();
        if n == 0 {
            return SpectralBounds {
                log_lower: f64::NEG_INFINITY,
                log_upper: f64::NEG_INFINITY,
                iterations: 0,
                converged: true,
            };
        }
        let mut v = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut terms = Vec::new();
        let mut best = (f64::NEG_INFINITY, f64::INFINITY);
        let mut iterations = 0;
        while iterations < max_iterations {
            iterations += 1;
            self.apply(&v, &mut w, &mut terms);
            let (lo, hi) = v
                .iter()
                .zip(&w)
                .map(|(a, b)| b - a)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
            best = (best.0.max(lo), best.1.min(hi));
            if best.1 - best.0 < tolerance {
                break;
            }
            let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi - top;
            }
        }
        SpectralBounds {
            log_lower: best.0,
            log_upper: best.1,
            iterations,
            converged: best.1 - best.0 < tolerance,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralBounds {
    pub log_lower: f64,
    pub log_upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const POWER_TOLERANCE: f64 = 1e-10;
pub const POWER_MAX_ITERATIONS: usize = 100_000;

/// Per-site pressure estimate of a free-boundary strip of width `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StripEstimate {
    pub width: usize,
    pub per_site_lower: f64,
    pub per_site_upper: f64,
    pub log_lambda_lower: f64,
    pub log_lambda_upper: f64,
    pub states: usize,
    pub iterations: usize,
    pub converged: bool,
}

impl StripEstimate {
    pub fn per_site(&self) -> f64 {
        0.5 * (self.per_site_lower + self.per_site_upper)
    }

    pub fn log_lambda(&self) -> f64 {
        0.5 * (self.log_lambda_lower + self.log_lambda_upper)
    }
}

/// Collatz–Wielandt bounds on `(ln λ_max) / m` for the width-`m` strip.
pub fn strip_pressure(width: usize, phi: &Interaction, budget: Budget) -> Result<StripEstimate> {
    let op = StripOperator::build(width, phi, budget)?;
    let b = op.spectral_bounds(POWER_TOLERANCE, POWER_MAX_ITERATIONS);
    let m = width as f64;
    Ok(StripEstimate {
        width,
        per_site_lower: b.log_lower / m,
        per_site_upper: b.log_upper / m,
        log_lambda_lower: b.log_lower,
        log_lambda_upper: b.log_upper,
        states: op.states(),
        iterations: b.iterations,
        converged: b.converged,
    })
}

/// Strip estimates for widths `1..=max_width` together with the width
/// increments `ln λ_m - ln λ_{m-1}`, which cancel the free-edge correction
/// and converge much faster than the per-site values.
#[derive(Clone, Debug, Serialize)]
pub struct StripSequence {
    pub estimates: Vec<StripEstimate>,
    /// `(width, lower, upper)` for widths `2..=max_width`.
    pub increments: Vec<(usize, f64, f64)>,
}

impl StripSequence {
    pub fn extrapolated(&self) -> Option<f64> {
        self.increments.last().map(|&(_, lo, hi)| 0.5 * (lo + hi))
    }
}

pub fn strip_sequence(max_width: usize, phi: &Interaction, budget: Budget) -> Result<StripSequence> {
    budget.check("strip row states", phi.q(), max_width)?;
    let estimates = (1..=max_width)
        .map(|m| strip_pressure(m, phi, budget))
        .collect::<Result<Vec<_>>>()?;
    let increments = estimates
        .windows(2)
        .map(|w| {
            (
                w[1].width,
                w[1].log_lambda_lower - w[0].log_lambda_upper,
                w[1].log_lambda_upper - w[0].log_lambda_lower,
            )
        })
        .collect();
    Ok(StripSequence {
        estimates,
        increments,
    })
}

/// `(1/m²) ln Z([1, m]²)` with free boundary.
pub fn box_log_partition(m: usize, phi: &Interaction, budget: Budget) -> Result<f64> {
    assert!(m >= 1);
    budget.check("box row states", phi.q(), m)?;
    let side = m as i32;
    let cr = ConstrainedRegion::free(Region::rectangle(1, side, 1, side));
    Ok(log_partition(&cr, phi).ln() / (m * m) as f64)
}
