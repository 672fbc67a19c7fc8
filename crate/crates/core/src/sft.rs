//! Local admissibility, single-site fillability and periodic points of the
//! nearest-neighbour shift of finite type underlying an interaction.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::{Configuration, Interaction, Symbol};
use crate::lattice::{boundary, Region, Site};

/// True iff no edge inside `w`'s region is forbidden.
pub fn is_locally_admissible(w: &Configuration, phi: &Interaction) -> bool {
    w.edges().all(|(_, a, axis, b)| phi.edge(axis, a, b).is_finite())
}

/// Can `a` sit at the origin surrounded by `eta` (south, west, east, north)?
pub fn fits(phi: &Interaction, eta: [Symbol; 4], a: Symbol) -> bool {
    let [s, w, e, n] = eta;
    phi.vertical(s, a).is_finite()
        && phi.horizontal(w, a).is_finite()
        && phi.horizontal(a, e).is_finite()
        && phi.vertical(a, n).is_finite()
}

/// A fill symbol for every neighbour pattern of a site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsfWitness {
    q: usize,
    fill: Vec<Symbol>,
}

impl SsfWitness {
    fn index(&self, eta: [Symbol; 4]) -> usize {
        eta.iter().fold(0, |acc, &a| acc * self.q + a as usize)
    }

    /// The (smallest) symbol that fits inside `eta`.
    pub fn fill(&self, eta: [Symbol; 4]) -> Symbol {
        self.fill[self.index(eta)]
    }

    /// Number of neighbour patterns covered, `q^4`.
    pub fn len(&self) -> usize {
        self.fill.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fill.is_empty()
    }

    /// Fills `site` given whatever neighbours `config` already assigns.
    /// Missing neighbours impose no constraint, so any pattern agreeing on the
    /// assigned ones gives a valid fill.
    pub fn fill_site(&self, config: &Configuration, site: Site) -> Symbol {
        let mut eta = [0; 4];
        for (slot, nb) in eta.iter_mut().zip(site.neighbors()) {
            *slot = config.get(nb).unwrap_or(0);
        }
        self.fill(eta)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SsfOutcome {
    Fillable(SsfWitness),
    /// First neighbour pattern (south, west, east, north) with no legal fill.
    Counterexample([Symbol; 4]),
}

impl SsfOutcome {
    pub fn is_fillable(&self) -> bool {
        matches!(self, SsfOutcome::Fillable(_))
    }
}

fn neighbor_patterns(q: usize) -> impl Iterator<Item = [Symbol; 4]> {
    (0..q.pow(4)).map(move |mut code| {
        let mut eta = [0; 4];
        for slot in eta.iter_mut().rev() {
            *slot = (code % q) as Symbol;
            code /= q;
        }
        eta
    })
}

/// Exhaustive single-site fillability check against the interaction's own
/// forbidden edges. Patterns are visited in lexicographic order.
pub fn ssf_check(phi: &Interaction) -> SsfOutcome {
    let q = phi.q();
    let mut fill = Vec::with_capacity(q.pow(4));
    for eta in neighbor_patterns(q) {
        match phi.symbols().find(|&a| fits(phi, eta, a)) {
            Some(a) => fill.push(a),
            None => return SsfOutcome::Counterexample(eta),
        }
    }
    SsfOutcome::Fillable(SsfWitness { q, fill })
}

/// The smallest symbol that fits next to every neighbour pattern.
pub fn safe_symbol_check(phi: &Interaction) -> Option<Symbol> {
    phi.symbols().find(|&a| {
        phi.symbols().all(|b| {
            phi.horizontal(a, b).is_finite()
                && phi.horizontal(b, a).is_finite()
                && phi.vertical(a, b).is_finite()
                && phi.vertical(b, a).is_finite()
        })
    })
}

/// Extends `w` one site at a time to `w`'s region plus `width` layers of
/// boundary, by backtracking. A `true` answer is a certificate for that
/// finite window only; global admissibility is undecidable in general, so
/// this is a heuristic.
pub fn extends_to_annulus(w: &Configuration, phi: &Interaction, width: usize) -> bool {
    if !is_locally_admissible(w, phi) {
        return false;
    }
    let mut covered = w.region();
    let mut annulus = Region::new();
    for _ in 0..width {
        let layer = boundary(&covered);
        annulus = annulus.union(&layer);
        covered = covered.union(&layer);
    }
    let order: Vec<Site> = annulus.iter().collect();
    let mut config = w.clone();
    backtrack(&order, 0, &mut config, phi)
}

fn backtrack(order: &[Site], i: usize, config: &mut Configuration, phi: &Interaction) -> bool {
    let Some(&site) = order.get(i) else {
        return true;
    };
    for a in phi.symbols() {
        let ok = site.neighbors().iter().all(|&nb| match config.get(nb) {
            Some(b) => phi.edge_between(site, a, nb, b).is_finite(),
            None => true,
        });
        if ok {
            config.insert(site, a);
            if backtrack(order, i + 1, config, phi) {
                return true;
            }
        }
    }
    config.remove(site);
    false
}

/// A configuration periodic under `(p1, 0)` and `(0, p2)` translations,
/// stored on its fundamental domain `[0, p1) x [0, p2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicPoint {
    periods: (usize, usize),
    cell: Vec<Symbol>,
}

impl PeriodicPoint {
    /// `cell` is row-major with `y` ascending: `cell[y * p1 + x]`.
    /// The periods are reduced to the smallest ones the cell admits.
    pub fn new(periods: (usize, usize), cell: Vec<Symbol>, phi: &Interaction) -> Result<Self> {
        let (p1, p2) = periods;
        if p1 == 0 || p2 == 0 || cell.len() != p1 * p2 {
            return Err(Error::InvalidPoint(format!(
                "cell of {} symbols does not match periods {p1}x{p2}",
                cell.len()
            )));
        }
        if let Some(&a) = cell.iter().find(|&&a| a as usize >= phi.q()) {
            return Err(Error::InvalidPoint(format!(
                "symbol {a} outside alphabet of size {}",
                phi.q()
            )));
        }
        let point = PeriodicPoint { periods, cell }.minimized();
        let window = point.window(&Region::rectangle(
            0,
            2 * point.periods.0 as i32 - 1,
            0,
            2 * point.periods.1 as i32 - 1,
        ));
        if let Some((site, ..)) = window
            .edges()
            .find(|&(_, a, axis, b)| phi.edge(axis, a, b).is_infinite())
        {
            return Err(Error::PointNotInSft(site));
        }
        Ok(point)
    }

    /// The fixed point `a^{Z^2}`.
    pub fn constant(phi: &Interaction, a: Symbol) -> Result<Self> {
        PeriodicPoint::new((1, 1), vec![a], phi)
    }

    pub fn periods(&self) -> (usize, usize) {
        self.periods
    }

    pub fn at(&self, site: Site) -> Symbol {
        let (p1, p2) = self.periods;
        let x = site.x.rem_euclid(p1 as i32) as usize;
        let y = site.y.rem_euclid(p2 as i32) as usize;
        self.cell[y * p1 + x]
    }

    /// `sigma_v z`, i.e. the point `u -> z(u + v)`.
    pub fn shifted(&self, v: Site) -> PeriodicPoint {
        let (p1, p2) = self.periods;
        let cell = Region::rectangle(0, p1 as i32 - 1, 0, p2 as i32 - 1)
            .iter()
            .map(|s| self.at(s.offset(v.x, v.y)))
            .collect();
        PeriodicPoint {
            periods: self.periods,
            cell,
        }
    }

    /// Restriction to a finite region.
    pub fn window(&self, region: &Region) -> Configuration {
        region.iter().map(|s| (s, self.at(s))).collect()
    }

    /// The fundamental domain `[0, p1) x [0, p2)` in canonical order.
    pub fn orbit_sites(&self) -> Vec<Site> {
        let (p1, p2) = self.periods;
        Region::rectangle(0, p1 as i32 - 1, 0, p2 as i32 - 1).iter().collect()
    }

    fn minimized(self) -> Self {
        let (p1, p2) = self.periods;
        let min1 = (1..=p1)
            .filter(|d| p1 % d == 0)
            .find(|&d| self.orbit_sites().iter().all(|s| self.at(*s) == self.at(s.offset(d as i32, 0))))
            .unwrap_or(p1);
        let min2 = (1..=p2)
            .filter(|d| p2 % d == 0)
            .find(|&d| self.orbit_sites().iter().all(|s| self.at(*s) == self.at(s.offset(0, d as i32))))
            .unwrap_or(p2);
        let cell = Region::rectangle(0, min1 as i32 - 1, 0, min2 as i32 - 1)
            .iter()
            .map(|s| self.at(s))
            .collect();
        PeriodicPoint {
            periods: (min1, min2),
            cell,
        }
    }

    pub fn from_json_str(s: &str, phi: &Interaction) -> Result<Self> {
        let file: CellFile = serde_json::from_str(s)?;
        let [p1, p2] = file.periods;
        if file.cell.len() != p2 || file.cell.iter().any(|row| row.len() != p1) {
            return Err(Error::InvalidPoint(format!(
                "cell must have {p2} rows of {p1} symbols"
            )));
        }
        PeriodicPoint::new((p1, p2), file.cell.concat(), phi)
    }

    pub fn from_json_file(path: impl AsRef<Path>, phi: &Interaction) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?, phi)
    }

    pub fn to_json_string(&self) -> String {
        let (p1, p2) = self.periods;
        let file = CellFile {
            periods: [p1, p2],
            cell: self.cell.chunks(p1).map(<[Symbol]>::to_vec).collect(),
        };
        serde_json::to_string(&file).expect("cell serializes")
    }
}

/// Periodic-point file: `{"periods": [p1, p2], "cell": [[row y=0], [row y=1], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellFile {
    periods: [usize; 2],
    cell: Vec<Vec<Symbol>>,
}

/// The parity point: `a` on sites with even coordinate sum, `b` on odd ones,
/// where `a` is the smallest symbol fitting inside `b^{N_0}`.
pub fn periodic_point_from_ssf(phi: &Interaction, b: Symbol) -> Result<PeriodicPoint> {
    if !ssf_check(phi).is_fillable() {
        return Err(Error::SsfPrerequisiteFailed);
    }
    if b as usize >= phi.q() {
        return Err(Error::InvalidPoint(format!("symbol {b} outside alphabet")));
    }
    let a = phi
        .symbols()
        .find(|&a| fits(phi, [b; 4], a))
        .ok_or(Error::SsfPrerequisiteFailed)?;
    PeriodicPoint::new((2, 2), vec![a, b, b, a], phi)
}

/// The frozen 3-colouring `x(i, j) = (i - j) mod 3`.
pub fn diagonal_3coloring_point() -> PeriodicPoint {
    let cell = Region::rectangle(0, 2, 0, 2)
        .iter()
        .map(|s| (s.x - s.y).rem_euclid(3) as Symbol)
        .collect();
    PeriodicPoint {
        periods: (3, 3),
        cell,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::centered_box;

    #[test]
    fn local_admissibility() {
        let hs = Interaction::hard_square(1.0).unwrap();
        let ones: Configuration = [(Site::new(0, 0), 1), (Site::new(0, 1), 1)].into_iter().collect();
        assert!(!is_locally_admissible(&ones, &hs));
        assert!(is_locally_admissible(&Configuration::constant(&centered_box(3), 0), &hs));

        let c3 = Interaction::checkerboard(3).unwrap();
        let same: Configuration = [(Site::new(0, 0), 2), (Site::new(1, 0), 2)].into_iter().collect();
        assert!(!is_locally_admissible(&same, &c3));
    }

    #[test]
    fn ssf_on_builtins() {
        let hs = Interaction::hard_square(1.0).unwrap();
        match ssf_check(&hs) {
            SsfOutcome::Fillable(w) => {
                assert_eq!(w.len(), 16);
                assert!(neighbor_patterns(2).all(|eta| w.fill(eta) == 0));
            }
            other => panic!("{other:?}"),
        }
        assert!(ssf_check(&Interaction::checkerboard(5).unwrap()).is_fillable());
        assert_eq!(
            ssf_check(&Interaction::checkerboard(4).unwrap()),
            SsfOutcome::Counterexample([0, 1, 2, 3])
        );
        assert_eq!(
            ssf_check(&Interaction::checkerboard(3).unwrap()),
            SsfOutcome::Counterexample([0, 0, 1, 2])
        );
    }

    #[test]
    fn safe_symbols() {
        assert_eq!(safe_symbol_check(&Interaction::hard_square(1.0).unwrap()), Some(0));
        for k in 2..7 {
            assert_eq!(safe_symbol_check(&Interaction::checkerboard(k).unwrap()), None);
        }
        assert_eq!(safe_symbol_check(&Interaction::ising(0.8).unwrap()), Some(0));
    }

    #[test]
    fn parity_points() {
        let hs = Interaction::hard_square(1.0).unwrap();
        let z = periodic_point_from_ssf(&hs, 1).unwrap();
        assert_eq!(z.periods(), (2, 2));
        for s in Region::rectangle(-3, 3, -3, 3).iter() {
            let odd = (s.x + s.y).rem_euclid(2) == 1;
            assert_eq!(z.at(s), odd as Symbol);
        }
        let zeros = periodic_point_from_ssf(&hs, 0).unwrap();
        assert_eq!(zeros, PeriodicPoint::constant(&hs, 0).unwrap());
        assert_eq!(zeros.orbit_sites(), vec![Site::ORIGIN]);

        let c5 = Interaction::checkerboard(5).unwrap();
        let z = periodic_point_from_ssf(&c5, 0).unwrap();
        assert_eq!(z.at(Site::ORIGIN), 1);
        assert_eq!(z.at(Site::new(1, 0)), 0);
        assert_eq!(z.orbit_sites().len(), 4);

        let c3 = Interaction::checkerboard(3).unwrap();
        assert!(matches!(periodic_point_from_ssf(&c3, 0), Err(Error::SsfPrerequisiteFailed)));
    }

    #[test]
    fn diagonal_point() {
        let c3 = Interaction::checkerboard(3).unwrap();
        let x = diagonal_3coloring_point();
        assert_eq!(x.at(Site::new(0, 0)), 0);
        assert_eq!(x.at(Site::new(1, 0)), 1);
        assert_eq!(x.at(Site::new(0, 1)), 2);
        assert_eq!(x.orbit_sites().len(), 9);
        assert!(is_locally_admissible(&x.window(&Region::rectangle(0, 5, 0, 5)), &c3));
        assert!(is_locally_admissible(&x.window(&Region::rectangle(-7, 4, -3, 9)), &c3));
        assert_eq!(PeriodicPoint::new((3, 3), x.cell.clone(), &c3).unwrap(), x);
    }

    #[test]
    fn diagonal_point_is_frozen_under_past_neighbours() {
        let c3 = Interaction::checkerboard(3).unwrap();
        let x = diagonal_3coloring_point();
        for v in x.orbit_sites() {
            let south = x.at(v.offset(0, -1));
            let west = x.at(v.offset(-1, 0));
            let legal: Vec<Symbol> = c3
                .symbols()
                .filter(|&a| c3.vertical(south, a).is_finite() && c3.horizontal(west, a).is_finite())
                .collect();
            assert_eq!(legal, vec![x.at(v)]);
        }
    }

    #[test]
    fn point_construction_errors() {
        let hs = Interaction::hard_square(1.0).unwrap();
        assert!(matches!(PeriodicPoint::constant(&hs, 1), Err(Error::PointNotInSft(_))));
        assert!(PeriodicPoint::new((2, 1), vec![0], &hs).is_err());
        assert!(PeriodicPoint::new((1, 1), vec![7], &hs).is_err());
    }

    #[test]
    fn periods_are_minimized_and_shift_works() {
        let c5 = Interaction::checkerboard(5).unwrap();
        let z = PeriodicPoint::new((4, 2), vec![0, 1, 0, 1, 1, 0, 1, 0], &c5).unwrap();
        assert_eq!(z.periods(), (2, 2));
        let shifted = z.shifted(Site::new(1, 0));
        assert_eq!(shifted.at(Site::ORIGIN), 1);
        for s in Region::rectangle(-2, 2, -2, 2).iter() {
            assert_eq!(shifted.at(s), z.at(s.offset(1, 0)));
        }
    }

    #[test]
    fn cell_file_round_trip() {
        let c3 = Interaction::checkerboard(3).unwrap();
        let x = diagonal_3coloring_point();
        let back = PeriodicPoint::from_json_str(&x.to_json_string(), &c3).unwrap();
        assert_eq!(back, x);
        assert!(PeriodicPoint::from_json_str(r#"{"periods":[2,1],"cell":[[0,0]]}"#, &c3).is_err());
    }

    #[test]
    fn annulus_extension() {
        let c3 = Interaction::checkerboard(3).unwrap();
        // the frozen pattern around a site extends, a contradictory one does not
        let x = diagonal_3coloring_point();
        assert!(extends_to_annulus(&x.window(&centered_box(1)), &c3, 2));
        let c4 = Interaction::checkerboard(4).unwrap();
        let eta: Configuration = Site::ORIGIN
            .neighbors()
            .iter()
            .zip([0, 1, 2, 3])
            .map(|(s, a)| (*s, a))
            .collect();
        assert!(!extends_to_annulus(&eta, &c4, 1));
    }

    #[test]
    fn witness_fill_extends_box_configurations() {
        let c5 = Interaction::checkerboard(5).unwrap();
        let SsfOutcome::Fillable(witness) = ssf_check(&c5) else {
            panic!("k = 5 is fillable");
        };
        let inner = centered_box(2);
        let mut w = Configuration::new();
        // a greedy locally admissible start, then the boundary one site at a time
        for s in inner.iter() {
            let a = witness.fill_site(&w, s);
            w.insert(s, a);
        }
        assert!(is_locally_admissible(&w, &c5));
        for s in boundary(&inner).iter() {
            let a = witness.fill_site(&w, s);
            w.insert(s, a);
        }
        assert!(is_locally_admissible(&w, &c5));
    }
}
