//! Edge-based enrichment indicators and Dörfler marking.
//!
//! For every interior edge `E` the current iterate `u*` is enriched by the
//! hat function `φ_E` of the edge midpoint on the virtually bisected patch.
//! Minimizing (linear case) or the second-order model of (nonlinear case)
//! the energy over `span{u*, φ_E}` is a 2×2 problem whose only
//! edge-dependent entries are integrals over the four patch children.

use crate::energy::{a_dot, barycentric_gradients, Discretization, EnergyError};
use crate::error::Result;
use crate::mesh::{bisect_patch_geometry, EdgePatch, MeshError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeIndicator {
    pub edge: usize,
    /// Predicted energy decay, never negative.
    pub decay: f64,
}

/// Global scalars shared by all edges of one mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalTerms {
    /// `E''[u*](u*, u*)`; equals `B(u*, u*)` for linear problems.
    pub h_uu: f64,
    /// `E'[u*](u*)`; equals `B(u*, u*) - ℓ(u*)` for linear problems.
    pub g_u: f64,
    /// `ℓ(u*)`.
    pub l_u: f64,
}

/// Entries of the local 2×2 problem in the basis `{u*, φ_E}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalSolve {
    /// Second-derivative entries `[uu, uφ, φφ]`.
    pub h: [f64; 3],
    /// First-derivative entries `[E'(u*), E'(φ_E)]`.
    pub g: [f64; 2],
    /// Load entries `[ℓ(u*), ℓ(φ_E)]`.
    pub l: [f64; 2],
    /// Coefficients of the improved function `α u* + β φ_E`.
    pub alpha: f64,
    pub beta: f64,
    /// `δ = (α - 1) u* + β φ_E`, in the same basis.
    pub delta: [f64; 2],
    /// Whether the 2×2 matrix was numerically singular.
    pub degenerate: bool,
}

impl GlobalTerms {
    pub fn new(disc: &Discretization, u: &[f64]) -> std::result::Result<Self, EnergyError> {
        let vals = disc.space().vertex_values(u);
        let reaction = disc.problem().reaction;
        let rule = disc.rule();
        let (mut h_uu, mut g_u, mut l_u) = (0.0, 0.0, 0.0);
        for (t, e) in disc.elements().iter().enumerate() {
            let uv = e.vertices.map(|v| vals[v]);
            let mut grad = [0.0; 2];
            for i in 0..3 {
                grad[0] += uv[i] * e.grads[i][0];
                grad[1] += uv[i] * e.grads[i][1];
            }
            let a = a_dot(&e.diffusion, grad, grad);
            let (mut hq, mut gq, mut lq) = (0.0, 0.0, 0.0);
            for (q, (b, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
                let uq = b[0] * uv[0] + b[1] * uv[1] + b[2] * uv[2];
                let f = disc.load_at(t, q);
                hq += w * reaction.dphi(uq) * uq * uq;
                gq += w * reaction.phi(uq) * uq;
                lq += w * f * uq;
            }
            h_uu += e.area * (a + hq);
            g_u += e.area * (a + gq - lq);
            l_u += e.area * lq;
        }
        for v in [h_uu, g_u, l_u] {
            if !v.is_finite() {
                return Err(EnergyError::NonFinite {
                    what: "global indicator terms",
                });
            }
        }
        Ok(Self { h_uu, g_u, l_u })
    }
}

/// Edge-dependent entries integrated over the four children of the
/// virtually bisected patch, combined with the cached global terms.
pub fn local_interactions(
    disc: &Discretization,
    vertex_values: &[f64],
    globals: &GlobalTerms,
    patch: &EdgePatch,
) -> std::result::Result<LocalSolve, EnergyError> {
    let reaction = disc.problem().reaction;
    let load = &disc.problem().load;
    let constant_load = load.constant();
    let rule = disc.rule();
    let [i, j] = patch.endpoints;
    let u_mid = 0.5 * (vertex_values[i] + vertex_values[j]);

    let (mut a_uphi, mut a_phiphi) = (0.0, 0.0);
    let (mut r_uphi, mut r_phiphi, mut r_phi) = (0.0, 0.0, 0.0);
    let mut l_phi = 0.0;
    for child in &patch.children {
        let area = child.area();
        let grads = barycentric_gradients(&child.points, area);
        let diffusion = &disc.elements()[child.parent].diffusion;
        // u* restricted to the child: nodal values at its three corners
        let uv = child.vertices.map(|v| v.map_or(u_mid, |v| vertex_values[v]));
        let mut grad_u = [0.0; 2];
        for s in 0..3 {
            grad_u[0] += uv[s] * grads[s][0];
            grad_u[1] += uv[s] * grads[s][1];
        }
        let grad_phi = grads[child.midpoint_slot];
        a_uphi += area * a_dot(diffusion, grad_u, grad_phi);
        a_phiphi += area * a_dot(diffusion, grad_phi, grad_phi);

        let (mut ru, mut rp, mut rg, mut lp) = (0.0, 0.0, 0.0, 0.0);
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let uq = b[0] * uv[0] + b[1] * uv[1] + b[2] * uv[2];
            let phi = b[child.midpoint_slot];
            let dphi = reaction.dphi(uq);
            ru += w * dphi * uq * phi;
            rp += w * dphi * phi * phi;
            rg += w * reaction.phi(uq) * phi;
            let f = match constant_load {
                Some(c) => c,
                None => {
                    let p = &child.points;
                    let x = [
                        b[0] * p[0][0] + b[1] * p[1][0] + b[2] * p[2][0],
                        b[0] * p[0][1] + b[1] * p[1][1] + b[2] * p[2][1],
                    ];
                    load.eval(x)?
                }
            };
            lp += w * f * phi;
        }
        r_uphi += area * ru;
        r_phiphi += area * rp;
        r_phi += area * rg;
        l_phi += area * lp;
    }

    let h = [globals.h_uu, a_uphi + r_uphi, a_phiphi + r_phiphi];
    let g = [globals.g_u, a_uphi + r_phi - l_phi];
    Ok(solve_local(h, g, [globals.l_u, l_phi]))
}

/// Closed-form solve of the 2×2 system `H δ = -g`; a numerically singular
/// matrix yields `δ = 0`.
pub fn solve_local(h: [f64; 3], g: [f64; 2], l: [f64; 2]) -> LocalSolve {
    let [huu, hup, hpp] = h;
    let det = huu * hpp - hup * hup;
    let scale = (huu * hpp).abs();
    let degenerate = !(det > 1e-14 * scale) || !det.is_finite();
    let delta = if degenerate {
        [0.0, 0.0]
    } else {
        [(-g[0] * hpp + g[1] * hup) / det, (-g[1] * huu + g[0] * hup) / det]
    };
    LocalSolve {
        h,
        g,
        l,
        alpha: 1.0 + delta[0],
        beta: delta[1],
        delta,
        degenerate,
    }
}

/// Closed-form energy decay of the exact local minimizer for a quadratic
/// energy, `(1-α)²/2 B_uu - β(1-α) B_uφ + β²/2 B_φφ`.
pub fn quadratic_decay(s: &LocalSolve) -> f64 {
    let [buu, bup, bpp] = s.h;
    let one_minus = 1.0 - s.alpha;
    (0.5 * one_minus * one_minus * buu - s.beta * one_minus * bup + 0.5 * s.beta * s.beta * bpp).max(0.0)
}

/// First-order predictor `-½ E'[u*](δ)`, clamped at zero.
pub fn predicted_decay(s: &LocalSolve) -> f64 {
    (-0.5 * (s.g[0] * s.delta[0] + s.g[1] * s.delta[1])).max(0.0)
}

/// Decay of the edge: exact for linear reactions, the predictor otherwise.
pub fn edge_decay(s: &LocalSolve, linear: bool) -> f64 {
    if linear {
        quadratic_decay(s)
    } else {
        predicted_decay(s)
    }
}

/// One indicator per interior edge, in ascending edge order.
pub fn compute_indicators(disc: &Discretization, u: &[f64]) -> Result<Vec<EdgeIndicator>> {
    if u.len() != disc.dim() {
        return Err(MeshError::DimensionMismatch {
            expected: disc.dim(),
            got: u.len(),
        }
        .into());
    }
    let globals = GlobalTerms::new(disc, u)?;
    let vals = disc.space().vertex_values(u);
    let linear = disc.problem().is_linear();
    let mesh = disc.mesh();
    let mut out = Vec::new();
    for edge in mesh.interior_edges() {
        let patch = bisect_patch_geometry(mesh, edge)?;
        let s = local_interactions(disc, &vals, &globals, &patch)?;
        out.push(EdgeIndicator {
            edge,
            decay: edge_decay(&s, linear),
        });
    }
    Ok(out)
}

/// Smallest set of edges whose decays sum to at least `θ` times the total,
/// taken greedily by decreasing decay (ties by ascending edge id).
pub fn doerfler_mark(indicators: &[EdgeIndicator], theta: f64) -> Vec<usize> {
    let total: f64 = indicators.iter().map(|i| i.decay).sum();
    if !(total > 0.0) {
        return Vec::new();
    }
    let mut order: Vec<&EdgeIndicator> = indicators.iter().collect();
    order.sort_by(|a, b| b.decay.total_cmp(&a.decay).then(a.edge.cmp(&b.edge)));
    let target = theta * total;
    let mut sum = 0.0;
    let mut marked = Vec::new();
    for ind in order {
        if sum >= target {
            break;
        }
        sum += ind.decay;
        marked.push(ind.edge);
    }
    marked
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::energy::{Diffusion, Load, Problem, Reaction};
    use crate::mesh::{refine_uniform, square, Domain, Mesh, P1Space};

    fn kite() -> Mesh {
        // interior edge (0,0)-(0,1) with opposite vertices (1,0.5), (-1,0.5)
        Mesh::new(
            vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.5], [-1.0, 0.5]],
            vec![[0, 2, 1], [1, 3, 0]],
        )
        .unwrap()
    }

    fn laplace(load: f64) -> Problem {
        Problem::new(
            Domain::Square,
            Diffusion::identity(),
            Reaction::Linear(0.0),
            Load::Constant(load),
        )
    }

    #[test]
    fn hand_solved_local_system() {
        // H δ = -g with g = H (1,0) - l reproduces α = 1, β = 0.5
        let s = solve_local([2.0, 0.0, 1.0], [2.0 - 2.0, 0.0 - 0.5], [2.0, 0.5]);
        assert!((s.alpha - 1.0).abs() < 1e-15 && (s.beta - 0.5).abs() < 1e-15);
        assert!((quadratic_decay(&s) - 0.125).abs() < 1e-15);
        assert!((predicted_decay(&s) - 0.125).abs() < 1e-15);

        let optimal = solve_local([2.0, 0.3, 1.0], [0.0, 0.0], [2.0, 0.3]);
        assert_eq!((optimal.alpha, optimal.beta), (1.0, 0.0));
        assert_eq!(quadratic_decay(&optimal), 0.0);
    }

    #[test]
    fn singular_system_gives_zero_decay() {
        let s = solve_local([0.0, 0.0, 1.0], [0.0, -1.0], [0.0, 1.0]);
        assert!(s.degenerate);
        assert_eq!(edge_decay(&s, true), 0.0);
    }

    #[test]
    fn kite_patch_integrals() {
        let mesh = Arc::new(kite());
        let space = P1Space::new(mesh.clone());
        assert_eq!(space.dim(), 0);
        let disc = Discretization::new(space, laplace(1.0)).unwrap();
        let globals = GlobalTerms::new(&disc, &[]).unwrap();
        let patch = bisect_patch_geometry(&mesh, mesh.find_edge(0, 1).unwrap()).unwrap();
        let vals = vec![0.0; 4];
        let s = local_interactions(&disc, &vals, &globals, &patch).unwrap();
        // a(u*, φ_E) = 0 for u* = 0, ∫φ_E = |ω_E| / 3 = 1/3
        assert_eq!(s.h[1], 0.0);
        assert!((s.l[1] - 1.0 / 3.0).abs() < 1e-15);
        // every child has area 1/4 and |∇φ_E|² = 5
        assert!((s.h[2] - 5.0).abs() < 1e-14, "{}", s.h[2]);
    }

    #[test]
    fn zero_data_gives_zero_indicators() {
        let mesh = refine_uniform(&refine_uniform(&square()).0).0;
        let space = P1Space::new(Arc::new(mesh));
        let disc = Discretization::new(space.clone(), laplace(0.0)).unwrap();
        let ind = compute_indicators(&disc, &space.zeros()).unwrap();
        assert!(!ind.is_empty());
        assert!(ind.iter().all(|i| i.decay == 0.0));
        assert!(doerfler_mark(&ind, 0.5).is_empty());
    }

    #[test]
    fn doerfler_examples() {
        let ind: Vec<EdgeIndicator> = [4.0, 3.0, 2.0, 1.0]
            .iter()
            .enumerate()
            .map(|(edge, &decay)| EdgeIndicator { edge, decay })
            .collect();
        assert_eq!(doerfler_mark(&ind, 0.5), vec![0, 1]);
        assert_eq!(doerfler_mark(&ind, 1.0 - 1e-12), vec![0, 1, 2, 3]);
        let ties: Vec<EdgeIndicator> = (0..4)
            .map(|edge| EdgeIndicator {
                edge: 3 - edge,
                decay: 1.0,
            })
            .collect();
        assert_eq!(doerfler_mark(&ties, 0.5), vec![0, 1]);
    }
}
