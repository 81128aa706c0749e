mod common;

use common::{barycentric, check_conforming, check_refinement, check_right_isosceles, random_mesh, rng, space};
use proptest::prelude::*;
use rand::Rng;
use vadapt::mesh::{prolong, read_ascii_tri, refine_nvb, write_ascii_tri, Domain};
use vadapt::CoeffVector;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nvb_keeps_meshes_conforming_nested_and_shape_regular(seed in any::<u64>(), lshape in any::<bool>(), rounds in 1usize..6) {
        let domain = if lshape { Domain::LShape } else { Domain::Square };
        let mut r = rng(seed);
        let mut mesh = random_mesh(&mut r, domain, 1, 0);
        for _ in 0..rounds {
            let marked: Vec<usize> = (0..mesh.num_edges()).filter(|_| r.gen_bool(0.2)).collect();
            let (fine, p) = refine_nvb(&mesh, &marked).unwrap();
            check_conforming(&fine, domain).unwrap();
            check_right_isosceles(&fine).unwrap();
            check_refinement(&mesh, &fine, &p, &marked).unwrap();
            mesh = fine;
        }
    }

    #[test]
    fn prolongation_is_linear_and_preserves_the_function(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut r = rng(seed);
        let coarse = random_mesh(&mut r, Domain::LShape, 1, 2);
        let marked: Vec<usize> = (0..coarse.num_edges()).filter(|_| r.gen_bool(0.3)).collect();
        let (fine, p) = refine_nvb(&coarse, &marked).unwrap();
        let (cs, fs) = (space(coarse.clone()), space(fine.clone()));
        let u = CoeffVector((0..cs.dim()).map(|_| r.gen_range(-1.0..1.0)).collect());
        let v = CoeffVector((0..cs.dim()).map(|_| r.gen_range(-1.0..1.0)).collect());
        let w = CoeffVector(u.iter().zip(v.iter()).map(|(x, y)| a * x + b * y).collect());
        let (pu, pv, pw) = (
            prolong(&u, &cs, &p, &fs).unwrap(),
            prolong(&v, &cs, &p, &fs).unwrap(),
            prolong(&w, &cs, &p, &fs).unwrap(),
        );
        for i in 0..fs.dim() {
            prop_assert!((pw[i] - (a * pu[i] + b * pv[i])).abs() <= 1e-12);
        }
        // fine nodal values equal the coarse function evaluated there
        let cvals = cs.vertex_values(&u);
        let fvals = fs.vertex_values(&pu);
        for (t, &parent) in p.parent_triangles().iter().enumerate() {
            let tri = coarse.triangles()[parent];
            let pts = coarse.triangle_points(parent);
            for &fv in &fine.triangles()[t] {
                let l = barycentric(pts, fine.vertices()[fv]);
                let expected: f64 = (0..3).map(|k| l[k] * cvals[tri[k]]).sum();
                prop_assert!((fvals[fv] - expected).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ascii_tri_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mesh = random_mesh(&mut r, Domain::LShape, 1, 3);
        let mut buf = Vec::new();
        write_ascii_tri(&mesh, &mut buf).unwrap();
        let back = read_ascii_tri(buf.as_slice()).unwrap();
        prop_assert_eq!(back.vertices(), mesh.vertices());
        prop_assert_eq!(back.triangles(), mesh.triangles());
    }
}

#[test]
fn empty_marking_leaves_the_mesh_unchanged() {
    let mesh = Domain::LShape.initial_mesh();
    let (fine, p) = refine_nvb(&mesh, &[]).unwrap();
    assert_eq!(fine.vertices(), mesh.vertices());
    assert_eq!(fine.triangles(), mesh.triangles());
    assert_eq!(p.new_vertex_count(), 0);
}
