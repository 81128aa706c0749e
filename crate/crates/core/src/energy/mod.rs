//! Discrete semilinear energy
//! `E(v) = ½∫A∇v·∇v + ∫Φ(v) - ∫f v` on a P1 space, with its gradient,
//! stiffness, mass and load assembly.

mod manufactured;
mod problem;
mod quadrature;
mod sparse;

use thiserror::Error;

pub use manufactured::{manufactured_rhs, singular_gradient, singular_laplacian, singular_solution};
pub use problem::{Diffusion, ExactSolution, Load, Problem, Reaction, Tensor};
pub use quadrature::{QuadratureRule, DEGREE6_POINTS};
pub use sparse::{dot, SparseOperator};

use crate::mesh::{CoeffVector, Mesh, P1Space, Point};

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error("diffusion tensor on triangle {triangle} is not symmetric positive definite")]
    NotSpd { triangle: usize },
    #[error("load is not finite at ({x}, {y})")]
    NonFiniteLoad { x: f64, y: f64 },
    #[error("{what} evaluated to a non-finite value")]
    NonFinite { what: &'static str },
    #[error("coefficient vector has length {got}, space has {expected} degrees of freedom")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Per-triangle data shared by every assembly and evaluation routine.
#[derive(Clone, Debug)]
pub struct ElementData {
    pub vertices: [usize; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grads: [[f64; 2]; 3],
    pub diffusion: Tensor,
}

/// Gradients of the barycentric coordinates of a triangle with positive
/// area `area`.
pub fn barycentric_gradients(p: &[Point; 3], area: f64) -> [[f64; 2]; 3] {
    let s = 0.5 / area;
    let mut g = [[0.0; 2]; 3];
    for (i, gi) in g.iter_mut().enumerate() {
        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        *gi = [s * (a[1] - b[1]), s * (b[0] - a[0])];
    }
    g
}

#[inline]
pub fn a_dot(a: &Tensor, u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * (a[0][0] * v[0] + a[0][1] * v[1]) + u[1] * (a[1][0] * v[0] + a[1][1] * v[1])
}

/// `|T| ∇λ_i · A ∇λ_j` for the triangle with corners `p`.
pub fn local_stiffness(p: &[Point; 3], a: &Tensor) -> [[f64; 3]; 3] {
    let area = crate::mesh::signed_area(p[0], p[1], p[2]);
    let g = barycentric_gradients(p, area);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * a_dot(a, g[i], g[j]);
        }
    }
    k
}

fn is_spd(a: &Tensor) -> bool {
    (a[0][1] - a[1][0]).abs() <= 1e-14 * (a[0][0].abs() + a[1][1].abs())
        && a[0][0] > 0.0
        && a[0][0] * a[1][1] - a[0][1] * a[1][0] > 0.0
}

/// Energy functional of a [`Problem`] on one [`P1Space`], with every
/// mesh-dependent quantity precomputed.
#[derive(Clone, Debug)]
pub struct Discretization {
    space: P1Space,
    problem: Problem,
    rule: QuadratureRule,
    elements: Vec<ElementData>,
    stiffness: SparseOperator,
    system: Option<SparseOperator>,
    load: Vec<f64>,
    load_qp: Option<Vec<[f64; DEGREE6_POINTS]>>,
}

impl Discretization {
    pub fn new(space: P1Space, problem: Problem) -> Result<Self, EnergyError> {
        let rule = QuadratureRule::degree6();
        let mesh = space.mesh();
        let mut elements = Vec::with_capacity(mesh.num_triangles());
        for t in 0..mesh.num_triangles() {
            let p = mesh.triangle_points(t);
            let area = mesh.area(t);
            let diffusion = problem.diffusion.at(mesh.centroid(t));
            if !is_spd(&diffusion) {
                return Err(EnergyError::NotSpd { triangle: t });
            }
            elements.push(ElementData {
                vertices: mesh.triangles()[t],
                area,
                grads: barycentric_gradients(&p, area),
                diffusion,
            });
        }

        let load_qp = match problem.load.constant() {
            Some(_) => None,
            None => {
                let mut values = Vec::with_capacity(elements.len());
                for t in 0..mesh.num_triangles() {
                    let mut fq = [0.0; DEGREE6_POINTS];
                    for (q, x) in rule.map(&mesh.triangle_points(t)).enumerate() {
                        fq[q] = problem.load.eval(x)?;
                    }
                    values.push(fq);
                }
                Some(values)
            }
        };

        let mut disc = Self {
            stiffness: SparseOperator::from_triplets(space.dim(), Vec::new()),
            system: None,
            load: Vec::new(),
            space,
            problem,
            rule,
            elements,
            load_qp,
        };
        disc.stiffness = disc.assemble(|e| {
            let mut k = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    k[i][j] = e.area * a_dot(&e.diffusion, e.grads[i], e.grads[j]);
                }
            }
            k
        });
        if let Some(c) = disc.problem.reaction.linear_coefficient() {
            disc.system = Some(if c == 0.0 {
                disc.stiffness.clone()
            } else {
                let mass = disc.mass_matrix();
                disc.stiffness.add_scaled(c, &mass)
            });
        }
        disc.load = disc.assemble_load();
        Ok(disc)
    }

    fn assemble(&self, local: impl Fn(&ElementData) -> [[f64; 3]; 3]) -> SparseOperator {
        let mut triplets = Vec::with_capacity(9 * self.elements.len());
        for e in &self.elements {
            let k = local(e);
            let dofs = e.vertices.map(|v| self.space.dof(v));
            for i in 0..3 {
                let Some(di) = dofs[i] else { continue };
                for j in 0..3 {
                    if let Some(dj) = dofs[j] {
                        triplets.push((di, dj, k[i][j]));
                    }
                }
            }
        }
        SparseOperator::from_triplets(self.space.dim(), triplets)
    }

    /// Exact P1 mass matrix.
    pub fn mass_matrix(&self) -> SparseOperator {
        self.assemble(|e| {
            let d = e.area / 6.0;
            let o = e.area / 12.0;
            [[d, o, o], [o, d, o], [o, o, d]]
        })
    }

    fn assemble_load(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.space.dim()];
        for (t, e) in self.elements.iter().enumerate() {
            let mut local = [0.0; 3];
            for (q, (l, w)) in self.rule.points.iter().zip(&self.rule.weights).enumerate() {
                let f = self.load_at(t, q);
                for i in 0..3 {
                    local[i] += w * e.area * f * l[i];
                }
            }
            for i in 0..3 {
                if let Some(d) = self.space.dof(e.vertices[i]) {
                    b[d] += local[i];
                }
            }
        }
        b
    }

    #[inline]
    pub fn load_at(&self, triangle: usize, q: usize) -> f64 {
        match &self.load_qp {
            Some(v) => v[triangle][q],
            None => self.problem.load.constant().unwrap_or(0.0),
        }
    }

    pub fn space(&self) -> &P1Space {
        &self.space
    }

    pub fn mesh(&self) -> &Mesh {
        self.space.mesh()
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn elements(&self) -> &[ElementData] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Stiffness matrix of `∫A∇u·∇v` on the interior degrees of freedom.
    pub fn stiffness(&self) -> &SparseOperator {
        &self.stiffness
    }

    /// System matrix `A + c M` for linear reactions.
    pub fn system_matrix(&self) -> Option<&SparseOperator> {
        self.system.as_ref()
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    fn check(&self, u: &[f64]) -> Result<(), EnergyError> {
        if u.len() == self.dim() {
            Ok(())
        } else {
            Err(EnergyError::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            })
        }
    }

    #[inline]
    fn element_gradient(e: &ElementData, uv: [f64; 3]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for i in 0..3 {
            g[0] += uv[i] * e.grads[i][0];
            g[1] += uv[i] * e.grads[i][1];
        }
        g
    }

    /// Energy by elementwise integration: the gradient term exactly, the
    /// reaction and load terms with the degree-6 rule.
    pub fn energy(&self, u: &[f64]) -> Result<f64, EnergyError> {
        self.check(u)?;
        let vals = self.space.vertex_values(u);
        let reaction = self.problem.reaction;
        let mut total = 0.0;
        for (t, e) in self.elements.iter().enumerate() {
            let uv = e.vertices.map(|v| vals[v]);
            let g = Self::element_gradient(e, uv);
            let mut local = 0.5 * a_dot(&e.diffusion, g, g);
            let mut quad = 0.0;
            for (q, (l, w)) in self.rule.points.iter().zip(&self.rule.weights).enumerate() {
                let uq = l[0] * uv[0] + l[1] * uv[1] + l[2] * uv[2];
                quad += w * (reaction.potential(uq) - self.load_at(t, q) * uq);
            }
            local += quad;
            total += e.area * local;
        }
        if total.is_finite() {
            Ok(total)
        } else {
            Err(EnergyError::NonFinite { what: "energy" })
        }
    }

    /// Energy and its gradient `g_j = E'[u](φ_j)`, both elementwise.
    pub fn energy_and_gradient(&self, u: &[f64], grad: &mut [f64]) -> Result<f64, EnergyError> {
        self.check(u)?;
        let vals = self.space.vertex_values(u);
        let mut gv = vec![0.0; vals.len()];
        let reaction = self.problem.reaction;
        let mut total = 0.0;
        for (t, e) in self.elements.iter().enumerate() {
            let uv = e.vertices.map(|v| vals[v]);
            let g = Self::element_gradient(e, uv);
            let mut local = 0.5 * a_dot(&e.diffusion, g, g);
            let mut lg = [0.0; 3];
            for i in 0..3 {
                lg[i] = a_dot(&e.diffusion, g, e.grads[i]);
            }
            for (q, (l, w)) in self.rule.points.iter().zip(&self.rule.weights).enumerate() {
                let uq = l[0] * uv[0] + l[1] * uv[1] + l[2] * uv[2];
                let f = self.load_at(t, q);
                local += w * (reaction.potential(uq) - f * uq);
                let r = w * (reaction.phi(uq) - f);
                for i in 0..3 {
                    lg[i] += r * l[i];
                }
            }
            total += e.area * local;
            for i in 0..3 {
                gv[e.vertices[i]] += e.area * lg[i];
            }
        }
        for (d, g) in grad.iter_mut().enumerate() {
            *g = gv[self.space.vertex(d)];
        }
        if total.is_finite() && grad.iter().all(|g| g.is_finite()) {
            Ok(total)
        } else {
            Err(EnergyError::NonFinite {
                what: "energy gradient",
            })
        }
    }

    pub fn gradient(&self, u: &[f64]) -> Result<Vec<f64>, EnergyError> {
        let mut g = vec![0.0; self.dim()];
        self.energy_and_gradient(u, &mut g)?;
        Ok(g)
    }

    /// `½ uᵀ(A + cM)u - bᵀu`, for linear reactions only.
    pub fn quadratic_energy(&self, u: &[f64]) -> Option<f64> {
        let k = self.system.as_ref()?;
        Some(0.5 * k.quadratic_form(u) - dot(&self.load, u))
    }

    /// `‖u‖_a² = ∫A∇u·∇u`.
    pub fn energy_norm_sq(&self, u: &[f64]) -> f64 {
        self.stiffness.quadratic_form(u)
    }

    /// `∫ A ∇(u_exact - u)·∇(u_exact - u)`, by the degree-6 rule.
    pub fn exact_error_sq(&self, u: &[f64], exact: ExactSolution) -> f64 {
        let vals = self.space.vertex_values(u);
        let mesh = self.space.mesh();
        let mut total = 0.0;
        for (t, e) in self.elements.iter().enumerate() {
            let uv = e.vertices.map(|v| vals[v]);
            let g = Self::element_gradient(e, uv);
            let mut local = 0.0;
            for (x, w) in self.rule.map(&mesh.triangle_points(t)).zip(&self.rule.weights) {
                let ge = exact.gradient(x);
                let d = [ge[0] - g[0], ge[1] - g[1]];
                local += w * a_dot(&e.diffusion, d, d);
            }
            total += e.area * local;
        }
        total
    }
}

/// Stiffness matrix `A_ij = ∫ A ∇φ_i·∇φ_j`.
pub fn assemble_stiffness(space: &P1Space, problem: &Problem) -> Result<SparseOperator, EnergyError> {
    Ok(Discretization::new(space.clone(), problem.clone())?.stiffness)
}

/// Load vector `b_j = ∫ f φ_j`.
pub fn assemble_load(space: &P1Space, problem: &Problem) -> Result<Vec<f64>, EnergyError> {
    Ok(Discretization::new(space.clone(), problem.clone())?.load)
}

pub fn energy(space: &P1Space, problem: &Problem, u: &CoeffVector) -> Result<f64, EnergyError> {
    Discretization::new(space.clone(), problem.clone())?.energy(u)
}

pub fn gradient(space: &P1Space, problem: &Problem, u: &CoeffVector) -> Result<Vec<f64>, EnergyError> {
    Discretization::new(space.clone(), problem.clone())?.gradient(u)
}

pub fn energy_norm_sq(space: &P1Space, problem: &Problem, u: &CoeffVector) -> Result<f64, EnergyError> {
    Ok(Discretization::new(space.clone(), problem.clone())?.energy_norm_sq(u))
}
