use faultrec::{build_index, build_stencil, Point2, PointCloud, SpatialIndex};
use proptest::prelude::*;

fn brute(points: &[Point2<f64>], q: Point2<f64>, k: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..points.len()).collect();
    ids.sort_by(|&a, &b| {
        points[a]
            .distance_squared(q)
            .total_cmp(&points[b].distance_squared(q))
            .then(a.cmp(&b))
    });
    ids.truncate(k);
    ids
}

fn coords() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..2000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nearest_matches_brute_force(xy in coords(), qx in -0.5f64..1.5, qy in -0.5f64..1.5, k in 1usize..30) {
        let points: Vec<_> = xy.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        let index = SpatialIndex::new(&points);
        let q = Point2::new(qx, qy);
        let got: Vec<usize> = index.nearest(q, k).iter().map(|n| n.index).collect();
        prop_assert_eq!(got, brute(&points, q, k));
    }

    #[test]
    fn within_matches_brute_force(xy in coords(), qx in 0.0f64..1.0, qy in 0.0f64..1.0, r in 0.0f64..0.3) {
        let points: Vec<_> = xy.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        let q = Point2::new(qx, qy);
        let mut got: Vec<usize> = SpatialIndex::new(&points).within(q, r).iter().map(|n| n.index).collect();
        got.sort();
        let want: Vec<usize> = (0..points.len()).filter(|&i| points[i].distance(q) <= r).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn stencils_exclude_center_and_are_nearest(xy in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 8..300), pick in any::<prop::sample::Index>()) {
        let mut sites: Vec<_> = xy.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        sites.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        sites.dedup();
        prop_assume!(sites.len() > 6);
        let cloud = PointCloud::from_fn(sites, |q| q.x).unwrap();
        let center = pick.index(cloud.len());
        let st = build_stencil(&cloud, &build_index(&cloud), center, 6).unwrap();
        prop_assert_eq!(st.len(), 6);
        prop_assert!(!st.neighbor_indices().contains(&center));
        let want: Vec<usize> = brute(cloud.sites(), cloud.site(center), 7).into_iter().filter(|&i| i != center).take(6).collect();
        prop_assert_eq!(st.neighbor_indices(), &want[..]);
    }
}
