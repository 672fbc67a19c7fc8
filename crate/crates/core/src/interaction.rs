//! Nearest-neighbour interactions, configurations and their energies.
//!
//! An interaction assigns an energy in `R ∪ {+∞}` to every ordered pair of
//! symbols on a horizontal edge `(v, v + e1)` and on a vertical edge
//! `(v, v + e2)`. Infinite entries are forbidden edges; they define the
//! underlying nearest-neighbour shift of finite type.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Region, Site};
use crate::sft::PeriodicPoint;

/// Index of a letter in the alphabet.
pub type Symbol = u8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Horizontal,
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if !(2..=Symbol::MAX as usize).contains(&size) {
            return Err(Error::InvalidAlphabet(size));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut a = Alphabet::new(labels.len())?;
        a.labels = Some(labels);
        Ok(a)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + Clone {
        (0..self.size).map(|a| a as Symbol)
    }

    pub fn label(&self, a: Symbol) -> String {
        match &self.labels {
            Some(l) => l[a as usize].clone(),
            None => a.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interaction {
    name: String,
    alphabet: Alphabet,
    horizontal: Vec<f64>,
    vertical: Vec<f64>,
}

impl Interaction {
    /// Builds an interaction from row-major `q x q` tables. Entries must be
    /// finite reals or `+∞`, and each table needs at least one finite entry.
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        horizontal: Vec<f64>,
        vertical: Vec<f64>,
    ) -> Result<Self> {
        let q = alphabet.size();
        for (axis, table) in [("horizontal", &horizontal), ("vertical", &vertical)] {
            if table.len() != q * q {
                return Err(Error::InvalidInteraction(format!(
                    "{axis} table has {} entries, expected {}",
                    table.len(),
                    q * q
                )));
            }
            if let Some(bad) = table.iter().find(|e| e.is_nan() || **e == f64::NEG_INFINITY) {
                return Err(Error::InvalidInteraction(format!(
                    "{axis} table entry {bad} is not a real or +inf"
                )));
            }
            if table.iter().all(|e| e.is_infinite()) {
                return Err(Error::InvalidInteraction(format!(
                    "{axis} table forbids every pair"
                )));
            }
        }
        Ok(Interaction {
            name: name.into(),
            alphabet,
            horizontal,
            vertical,
        })
    }

    /// Hard-square shift with activity `lambda` on the symbol 1.
    ///
    /// The vertex weight is folded into the edges: each endpoint carrying a 1
    /// contributes `-(ln lambda)/4` to the edge energy, so a site with all
    /// four edges present receives weight `lambda`.
    pub fn hard_square(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInteraction(format!(
                "hard-square activity must be positive, got {lambda}"
            )));
        }
        let share = -lambda.ln() / 4.0;
        let table = vec![0.0, share, share, f64::INFINITY];
        Interaction::new(
            format!("hardsquare(lambda={lambda})"),
            Alphabet::new(2)?,
            table.clone(),
            table,
        )
    }

    /// Proper `k`-colourings: equal symbols on an edge are forbidden.
    pub fn checkerboard(k: usize) -> Result<Self> {
        let alphabet = Alphabet::new(k)?;
        let table: Vec<f64> = (0..k * k)
            .map(|i| if i / k == i % k { f64::INFINITY } else { 0.0 })
            .collect();
        Interaction::new(format!("checkerboard(k={k})"), alphabet, table.clone(), table)
    }

    /// Ising model, `Phi(a, b) = -beta s(a) s(b)` with `s(0) = -1`, `s(1) = +1`.
    pub fn ising(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidInteraction(format!("beta must be finite, got {beta}")));
        }
        let spin = |a: usize| if a == 0 { -1.0 } else { 1.0 };
        let table: Vec<f64> = (0..4).map(|i| -beta * spin(i / 2) * spin(i % 2)).collect();
        Interaction::new(
            format!("ising(beta={beta})"),
            Alphabet::with_labels(vec!["-".into(), "+".into()])?,
            table.clone(),
            table,
        )
    }

    /// The zero interaction on the full shift over `q` symbols.
    pub fn full_shift(q: usize) -> Result<Self> {
        Interaction::new(
            format!("fullshift(q={q})"),
            Alphabet::new(q)?,
            vec![0.0; q * q],
            vec![0.0; q * q],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn q(&self) -> usize {
        self.alphabet.size
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + Clone {
        self.alphabet.symbols()
    }

    /// Energy of `a` at `v` and `b` at `v + e1`.
    #[inline]
    pub fn horizontal(&self, a: Symbol, b: Symbol) -> f64 {
        self.horizontal[a as usize * self.q() + b as usize]
    }

    /// Energy of `a` at `v` and `b` at `v + e2`.
    #[inline]
    pub fn vertical(&self, a: Symbol, b: Symbol) -> f64 {
        self.vertical[a as usize * self.q() + b as usize]
    }

    #[inline]
    pub fn edge(&self, axis: Axis, a: Symbol, b: Symbol) -> f64 {
        match axis {
            Axis::Horizontal => self.horizontal(a, b),
            Axis::Vertical => self.vertical(a, b),
        }
    }

    /// Energy of the edge `{u, v}` for adjacent sites, oriented along the
    /// positive axis direction.
    pub fn edge_between(&self, u: Site, a: Symbol, v: Site, b: Symbol) -> f64 {
        debug_assert!(u.is_adjacent(v));
        match (v.x - u.x, v.y - u.y) {
            (1, 0) => self.horizontal(a, b),
            (-1, 0) => self.horizontal(b, a),
            (0, 1) => self.vertical(a, b),
            _ => self.vertical(b, a),
        }
    }

    /// Smallest and largest finite table entries.
    pub fn finite_range(&self) -> (f64, f64) {
        self.horizontal
            .iter()
            .chain(&self.vertical)
            .filter(|e| e.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
                (lo.min(e), hi.max(e))
            })
    }

    pub fn has_forbidden_edges(&self) -> bool {
        self.horizontal.iter().chain(&self.vertical).any(|e| e.is_infinite())
    }

    pub fn horizontal_table(&self) -> &[f64] {
        &self.horizontal
    }

    pub fn vertical_table(&self) -> &[f64] {
        &self.vertical
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s)?;
        file.into_interaction()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut model = Self::from_json_str(&std::fs::read_to_string(path)?)?;
        model.name = format!("file({})", path.display());
        Ok(model)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from_interaction(self))
            .expect("model tables serialize")
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Table entry in model files: a number, or the string `"inf"`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Finite(f64),
    Sentinel(Sentinel),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
enum Sentinel {
    #[serde(rename = "inf")]
    Inf,
}

impl Entry {
    fn value(self) -> f64 {
        match self {
            Entry::Finite(x) => x,
            Entry::Sentinel(Sentinel::Inf) => f64::INFINITY,
        }
    }

    fn from_value(x: f64) -> Self {
        if x == f64::INFINITY {
            Entry::Sentinel(Sentinel::Inf)
        } else {
            Entry::Finite(x)
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    alphabet_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    horizontal: Vec<Vec<Entry>>,
    vertical: Vec<Vec<Entry>>,
}

impl ModelFile {
    fn into_interaction(self) -> Result<Interaction> {
        let alphabet = match self.labels {
            Some(labels) if labels.len() != self.alphabet_size => {
                return Err(Error::InvalidInteraction(format!(
                    "{} labels for alphabet of size {}",
                    labels.len(),
                    self.alphabet_size
                )))
            }
            Some(labels) => Alphabet::with_labels(labels)?,
            None => Alphabet::new(self.alphabet_size)?,
        };
        let flatten = |rows: Vec<Vec<Entry>>, axis: &str| -> Result<Vec<f64>> {
            if rows.len() != self.alphabet_size
                || rows.iter().any(|r| r.len() != self.alphabet_size)
            {
                return Err(Error::InvalidInteraction(format!(
                    "{axis} table must be {0}x{0}",
                    self.alphabet_size
                )));
            }
            Ok(rows.into_iter().flatten().map(Entry::value).collect())
        };
        let h = flatten(self.horizontal, "horizontal")?;
        let v = flatten(self.vertical, "vertical")?;
        Interaction::new("file", alphabet, h, v)
    }

    fn from_interaction(phi: &Interaction) -> Self {
        let q = phi.q();
        let rows = |t: &[f64]| -> Vec<Vec<Entry>> {
            t.chunks(q)
                .map(|r| r.iter().copied().map(Entry::from_value).collect())
                .collect()
        };
        ModelFile {
            alphabet_size: q,
            labels: phi.alphabet.labels.clone(),
            horizontal: rows(&phi.horizontal),
            vertical: rows(&phi.vertical),
        }
    }
}

/// A symbol assignment on a finite set of sites.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Configuration {
    symbols: BTreeMap<Site, Symbol>,
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    /// The configuration `a^S`.
    pub fn constant(region: &Region, a: Symbol) -> Self {
        region.iter().map(|s| (s, a)).collect()
    }

    /// Pairs sites of `region` (canonical order) with `symbols`.
    pub fn from_symbols(region: &Region, symbols: &[Symbol]) -> Self {
        assert_eq!(region.len(), symbols.len());
        region.iter().zip(symbols.iter().copied()).collect()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, site: Site) -> Option<Symbol> {
        self.symbols.get(&site).copied()
    }

    pub fn insert(&mut self, site: Site, a: Symbol) -> Option<Symbol> {
        self.symbols.insert(site, a)
    }

    pub fn remove(&mut self, site: Site) -> Option<Symbol> {
        self.symbols.remove(&site)
    }

    pub fn region(&self) -> Region {
        self.symbols.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, Symbol)> + '_ {
        self.symbols.iter().map(|(s, a)| (*s, *a))
    }

    pub fn restrict(&self, region: &Region) -> Configuration {
        self.iter().filter(|(s, _)| region.contains(*s)).collect()
    }

    /// The concatenation `self other`; overlapping sites must agree.
    pub fn concat(&self, other: &Configuration) -> Result<Configuration> {
        let mut out = self.clone();
        for (s, a) in other.iter() {
            if let Some(prev) = out.insert(s, a) {
                if prev != a {
                    return Err(Error::InconsistentConcatenation(s));
                }
            }
        }
        Ok(out)
    }

    /// Iterates every edge with both endpoints in this configuration, once,
    /// as `(lower-left site, its symbol, axis, other symbol)`.
    pub fn edges(&self) -> impl Iterator<Item = (Site, Symbol, Axis, Symbol)> + '_ {
        self.iter().flat_map(move |(s, a)| {
            let right = self.get(s.offset(1, 0)).map(|b| (s, a, Axis::Horizontal, b));
            let up = self.get(s.offset(0, 1)).map(|b| (s, a, Axis::Vertical, b));
            right.into_iter().chain(up)
        })
    }
}

impl FromIterator<(Site, Symbol)> for Configuration {
    fn from_iter<I: IntoIterator<Item = (Site, Symbol)>>(iter: I) -> Self {
        Configuration {
            symbols: iter.into_iter().collect(),
        }
    }
}

/// `U(w)`: sum of edge energies over all edges inside `w`'s region.
pub fn energy(w: &Configuration, phi: &Interaction) -> f64 {
    w.edges().map(|(_, a, axis, b)| phi.edge(axis, a, b)).sum()
}

/// `U(w delta)` restricted to edges touching `w`'s region, so energy carried
/// by edges internal to `delta` is left out.
pub fn energy_with_boundary(
    w: &Configuration,
    delta: &Configuration,
    phi: &Interaction,
) -> Result<f64> {
    let joined = w.concat(delta)?;
    Ok(joined
        .edges()
        .filter(|(s, _, axis, _)| {
            let other = match axis {
                Axis::Horizontal => s.offset(1, 0),
                Axis::Vertical => s.offset(0, 1),
            };
            w.get(*s).is_some() || w.get(other).is_some()
        })
        .map(|(_, a, axis, b)| phi.edge(axis, a, b))
        .sum())
}

/// `A_Phi(sigma_v z)`: minus the energies of the two forward edges at `v`.
pub fn per_site_contribution(z: &PeriodicPoint, v: Site, phi: &Interaction) -> Result<f64> {
    let a = z.at(v);
    let h = phi.horizontal(a, z.at(v.offset(1, 0)));
    let u = phi.vertical(a, z.at(v.offset(0, 1)));
    if h.is_infinite() || u.is_infinite() {
        return Err(Error::PointNotInSft(v));
    }
    Ok(-h - u)
}
