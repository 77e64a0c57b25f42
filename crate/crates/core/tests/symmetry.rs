use std::collections::HashSet;

use zcap::geometry::{all_points, factorize, is_collinear};
use zcap::ilp::CutDescriptor;
use zcap::symmetry::{general_linear, orbit_canonical, wlog_cuts, AffineMap};
use zcap::Point;

fn same_set(x: &[Point], y: &[Point]) -> bool {
    let (mut x, mut y) = (x.to_vec(), y.to_vec());
    x.sort_unstable();
    y.sort_unstable();
    x == y
}

/// An affine map taking `from[i]` to `to[i]` for the first two entries and
/// `from` onto `to` as sets, searched over matrices with the shift fixed by
/// the first pair.
fn witness(from: &[Point], to: &[Point], n: u32) -> Option<AffineMap> {
    let gl = general_linear(n);
    for i in 0..from.len() {
        for j in 0..from.len() {
            if i == j {
                continue;
            }
            for m in &gl {
                let shift = to[0].sub(m.apply(from[i], n), n);
                if m.apply(from[j], n).add(shift, n) != to[1] {
                    continue;
                }
                let g = AffineMap::new(*m, shift, n).unwrap();
                let img = g.apply_all(from);
                if to.iter().all(|p| img.contains(p)) {
                    return Some(g);
                }
            }
        }
    }
    None
}

#[test]
fn wlog_cuts_at_14_have_witnesses() {
    let n = 14;
    let a = Point::ORIGIN;
    let b = Point::new(1, 0);
    let cuts = wlog_cuts(&[a], &[b], n).unwrap();
    assert!(!cuts.is_empty());
    let mut fix_zero = 0;
    for cut in &cuts {
        match *cut {
            CutDescriptor::FixZero(z) => {
                fix_zero += 1;
                let g = witness(&[a, z], &[a, b], n).unwrap_or_else(|| panic!("no witness for {z}"));
                assert!(same_set(&g.apply_all(&[a, z]), &[a, b]));
            }
            CutDescriptor::PairExclusion(z1, z2) => {
                let g = witness(&[a, z1, z2], &[a, b], n).unwrap_or_else(|| panic!("no witness for {z1} {z2}"));
                let img = g.apply_all(&[a, z1, z2]);
                assert!(img.contains(&a) && img.contains(&b));
            }
            _ => panic!("unexpected cut {cut:?}"),
        }
    }
    // (1,0) itself can always be moved onto b
    assert!(cuts.contains(&CutDescriptor::FixZero(b)));
    assert!(fix_zero > 0);
}

#[test]
fn wlog_cuts_are_exactly_the_equivalent_points() {
    // with one fixed point and one excluded point every point z with
    // {a, z} equivalent to {a, b} must be cut
    let n = 6;
    let a = Point::ORIGIN;
    let b = Point::new(2, 3);
    let cuts = wlog_cuts(&[a], &[b], n).unwrap();
    for z in all_points(n).filter(|&z| z != a) {
        let expected = witness(&[a, z], &[a, b], n).is_some();
        assert_eq!(cuts.contains(&CutDescriptor::FixZero(z)), expected, "{z}");
    }
}

/// Six-point caps in Z_25^2 made of three neighbourhood pairs with
/// c1 = (0,0), c3 = (1,0), c5 = (0,1).
#[test]
fn three_neighbour_pairs_at_25_fall_into_104_orbits() {
    let n = 25;
    let f = factorize(n as u64).unwrap();
    let partners = |c: Point| -> Vec<Point> {
        (0..5)
            .flat_map(|i| (0..5).map(move |j| Point::new((c.u + 5 * i) % 25, (c.v + 5 * j) % 25)))
            .filter(|&q| q != c)
            .collect()
    };
    let cap = |s: &[Point]| {
        (0..6).all(|i| (i + 1..6).all(|j| (j + 1..6).all(|k| !is_collinear(&[s[i], s[j], s[k]], &f).unwrap())))
    };
    let (c1, c3, c5) = (Point::ORIGIN, Point::new(1, 0), Point::new(0, 1));
    let mut orbits = HashSet::new();
    for c2 in partners(c1) {
        for c4 in partners(c3) {
            for c6 in partners(c5) {
                let s = [c1, c2, c3, c4, c5, c6];
                if cap(&s) {
                    orbits.insert(orbit_canonical(&s, n).unwrap());
                }
            }
        }
    }
    assert_eq!(orbits.len(), 104);
}
