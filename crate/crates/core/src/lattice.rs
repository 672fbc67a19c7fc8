//! Geometry of the square lattice: sites, finite regions, boxes, the
//! lexicographic past and boundaries.
//!
//! Sites are ordered lexicographically with the *last* coordinate most
//! significant, so iterating a [`Region`] walks rows bottom to top and each
//! row left to right.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A vertex of the square lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub x: i32,
    pub y: i32,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Site { x, y }
    }

    /// `self + (dx, dy)`.
    pub const fn offset(self, dx: i32, dy: i32) -> Self {
        Site {
            x: self.x + dx,
            y: self.y + dy,
        }
    }

    /// The four nearest neighbours in canonical order: south, west, east, north.
    pub fn neighbors(self) -> [Site; 4] {
        [
            self.offset(0, -1),
            self.offset(-1, 0),
            self.offset(1, 0),
            self.offset(0, 1),
        ]
    }

    pub fn l1_distance(self, other: Site) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn is_adjacent(self, other: Site) -> bool {
        self.l1_distance(other) == 1
    }

    /// Membership in the lexicographic past: strictly smaller than the origin
    /// in the order comparing `y` first, then `x`.
    pub fn is_past(self) -> bool {
        self.y < 0 || (self.y == 0 && self.x < 0)
    }

    /// Point reflection through the origin.
    pub fn reflect(self) -> Site {
        Site::new(-self.x, -self.y)
    }
}

impl Ord for Site {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Site {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A finite set of sites, iterated in canonical (row-major, bottom-up) order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Region {
    sites: BTreeSet<Site>,
}

impl Region {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: Site) -> bool {
        self.sites.contains(&site)
    }

    pub fn insert(&mut self, site: Site) -> bool {
        self.sites.insert(site)
    }

    pub fn remove(&mut self, site: Site) -> bool {
        self.sites.remove(&site)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Site> + '_ {
        self.sites.iter().copied()
    }

    /// The axis-aligned rectangle `[x0, x1] x [y0, y1]` (empty if reversed).
    pub fn rectangle(x0: i32, x1: i32, y0: i32, y1: i32) -> Region {
        (y0..=y1)
            .flat_map(|y| (x0..=x1).map(move |x| Site::new(x, y)))
            .collect()
    }

    pub fn union(&self, other: &Region) -> Region {
        self.sites.union(&other.sites).copied().collect()
    }

    pub fn intersection(&self, other: &Region) -> Region {
        self.sites.intersection(&other.sites).copied().collect()
    }

    pub fn difference(&self, other: &Region) -> Region {
        self.sites.difference(&other.sites).copied().collect()
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.sites.is_disjoint(&other.sites)
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.sites.is_subset(&other.sites)
    }

    pub fn filter(&self, mut keep: impl FnMut(Site) -> bool) -> Region {
        self.iter().filter(|&s| keep(s)).collect()
    }

    /// Minimum L1 distance between the two regions, `None` if either is empty.
    pub fn distance(&self, other: &Region) -> Option<u32> {
        self.iter()
            .flat_map(|a| other.iter().map(move |b| a.l1_distance(b)))
            .min()
    }

    /// Groups the sites by row: `(y, xs)` with both `y` and `xs` ascending.
    pub fn rows(&self) -> Vec<(i32, Vec<i32>)> {
        let mut rows: Vec<(i32, Vec<i32>)> = Vec::new();
        for site in self.iter() {
            match rows.last_mut() {
                Some((y, xs)) if *y == site.y => xs.push(site.x),
                _ => rows.push((site.y, vec![site.x])),
            }
        }
        rows
    }

    /// Splits the region into its connected components under adjacency.
    pub fn components(&self) -> Vec<Region> {
        let mut unseen = self.sites.clone();
        let mut out = Vec::new();
        while let Some(&start) = unseen.iter().next() {
            unseen.remove(&start);
            let mut comp = Region::new();
            let mut stack = vec![start];
            while let Some(s) = stack.pop() {
                comp.insert(s);
                for nb in s.neighbors() {
                    if unseen.remove(&nb) {
                        stack.push(nb);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

impl FromIterator<Site> for Region {
    fn from_iter<I: IntoIterator<Item = Site>>(iter: I) -> Self {
        Region {
            sites: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Region {
    type Item = &'a Site;
    type IntoIter = std::collections::btree_set::Iter<'a, Site>;

    fn into_iter(self) -> Self::IntoIter {
        self.sites.iter()
    }
}

/// The centred box `[-n, n]^2`.
pub fn centered_box(n: u32) -> Region {
    let n = n as i32;
    Region::rectangle(-n, n, -n, n)
}

/// Sites of `[-n, n]^2` lying in the lexicographic past.
pub fn past_in_box(n: u32) -> Region {
    centered_box(n).filter(Site::is_past)
}

/// Exterior boundary: sites outside `region` adjacent to some site of it.
pub fn boundary(region: &Region) -> Region {
    region
        .iter()
        .flat_map(Site::neighbors)
        .filter(|s| !region.contains(*s))
        .collect()
}

/// Sites of `region` adjacent to its complement.
pub fn inner_boundary(region: &Region) -> Region {
    region.filter(|s| s.neighbors().iter().any(|nb| !region.contains(*nb)))
}

/// The split of the boundary of the "future half box" used by the canopy
/// bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanopyDecomposition {
    /// `[-n, n]^2` minus its past: the origin and everything after it.
    pub future: Region,
    /// Boundary sites lying in the past.
    pub upper: Region,
    /// The remaining boundary sites.
    pub canopy: Region,
}

pub fn canopy_decomposition(n: u32) -> CanopyDecomposition {
    assert!(n >= 1, "canopy decomposition needs n >= 1");
    let full = centered_box(n);
    let future = full.difference(&past_in_box(n));
    let ring = boundary(&future);
    let upper = ring.filter(Site::is_past);
    let canopy = ring.difference(&upper);
    CanopyDecomposition {
        future,
        upper,
        canopy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(sites: &[(i32, i32)]) -> Region {
        sites.iter().map(|&(x, y)| Site::new(x, y)).collect()
    }

    #[test]
    fn boxes_have_expected_sizes() {
        assert_eq!(centered_box(0), region(&[(0, 0)]));
        assert_eq!(centered_box(1).len(), 9);
        assert_eq!(centered_box(2).len(), 25);
    }

    #[test]
    fn past_in_small_boxes() {
        assert!(past_in_box(0).is_empty());
        assert_eq!(
            past_in_box(1),
            region(&[(-1, -1), (0, -1), (1, -1), (-1, 0)])
        );
        for n in 0..8u32 {
            let side = 2 * n as usize + 1;
            assert_eq!(past_in_box(n).len(), (side * side - 1) / 2);
        }
    }

    #[test]
    fn box_splits_into_origin_past_and_reflected_past() {
        for n in 0..6 {
            let past = past_in_box(n);
            let reflected: Region = past.iter().map(Site::reflect).collect();
            assert!(past.is_disjoint(&reflected));
            assert!(!past.contains(Site::ORIGIN) && !reflected.contains(Site::ORIGIN));
            let mut all = past.union(&reflected);
            all.insert(Site::ORIGIN);
            assert_eq!(all, centered_box(n));
        }
    }

    #[test]
    fn boundaries() {
        assert_eq!(
            boundary(&region(&[(0, 0)])),
            region(&[(0, -1), (-1, 0), (1, 0), (0, 1)])
        );
        assert_eq!(boundary(&centered_box(1)).len(), 12);
        assert_eq!(boundary(&region(&[(0, 0), (1, 0)])).len(), 6);

        assert_eq!(inner_boundary(&region(&[(0, 0)])), region(&[(0, 0)]));
        assert_eq!(inner_boundary(&centered_box(0)), region(&[(0, 0)]));
        let ib = inner_boundary(&centered_box(2));
        assert_eq!(ib.len(), 16);
        assert!(ib.iter().all(|s| s.x.abs() == 2 || s.y.abs() == 2));
    }

    #[test]
    fn inner_boundary_matches_boundary_of_complement() {
        // Complement taken inside a window large enough to surround the region.
        let s = region(&[(0, 0), (1, 0), (1, 1), (3, 2), (-1, 2)]);
        let window = Region::rectangle(-4, 6, -4, 6);
        let complement = window.difference(&s);
        let from_complement = boundary(&complement).intersection(&s);
        assert_eq!(inner_boundary(&s), from_complement);
        assert!(boundary(&s).is_disjoint(&s));
        assert!(inner_boundary(&s).is_subset(&s));
    }

    #[test]
    fn canopy_decomposition_first_radius() {
        let d = canopy_decomposition(1);
        assert_eq!(
            d.future,
            region(&[(0, 0), (1, 0), (-1, 1), (0, 1), (1, 1)])
        );
        assert_eq!(d.upper, region(&[(-1, 0), (0, -1), (1, -1)]));
        assert_eq!(
            d.canopy,
            region(&[(2, 0), (-2, 1), (2, 1), (-1, 2), (0, 2), (1, 2)])
        );
    }

    #[test]
    fn canopy_never_touches_upper_layer() {
        for n in 1..=6 {
            let d = canopy_decomposition(n);
            assert!(d.future.is_disjoint(&d.upper));
            assert!(d.future.is_disjoint(&d.canopy));
            assert!(d.upper.is_disjoint(&d.canopy));
            assert_eq!(d.upper.union(&d.canopy), boundary(&d.future));
            assert!(d.canopy.distance(&d.upper).unwrap() >= 2, "n = {n}");
            assert_eq!(d.upper.len(), 2 * n as usize + 1);
            assert_eq!(d.canopy.len(), 4 * n as usize + 2);
            // every neighbour of the future half box is accounted for
            let closure = d.future.union(&d.upper).union(&d.canopy);
            for s in d.future.iter() {
                assert!(s.neighbors().iter().all(|nb| closure.contains(*nb)));
            }
        }
    }

    #[test]
    fn iteration_is_row_major_bottom_up() {
        let r = region(&[(1, 1), (0, 0), (-1, 1), (5, -2)]);
        let order: Vec<Site> = r.iter().collect();
        assert_eq!(
            order,
            vec![
                Site::new(5, -2),
                Site::new(0, 0),
                Site::new(-1, 1),
                Site::new(1, 1)
            ]
        );
        assert_eq!(order, r.iter().collect::<Vec<_>>());
        assert_eq!(r.rows(), vec![(-2, vec![5]), (0, vec![0]), (1, vec![-1, 1])]);
    }

    #[test]
    fn components_of_box_boundary_are_four_sides() {
        let comps = components_of(&boundary(&centered_box(2)));
        assert_eq!(comps, vec![5, 5, 5, 5]);
    }

    fn components_of(r: &Region) -> Vec<usize> {
        let mut sizes: Vec<usize> = r.components().iter().map(Region::len).collect();
        sizes.sort_unstable();
        sizes
    }
}
