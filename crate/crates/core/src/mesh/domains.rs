//! Initial meshes for the catalog domains.
//!
//! Every triangle is right isosceles with its hypotenuse as the refinement
//! edge, so all newest-vertex-bisection descendants stay right isosceles.

use super::{Mesh, Point};

/// Computational domains of the problem catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `(0,1)^2`.
    Square,
    /// `(-1,1)^2 \ [0,1]x[-1,0]`.
    LShape,
    /// `(0,1)^2` on a uniform `n x n` grid of cells, for data that is
    /// piecewise constant on grid-aligned rectangles.
    SquareGrid(usize),
}

impl Domain {
    pub fn initial_mesh(self) -> Mesh {
        match self {
            Domain::Square => square(),
            Domain::LShape => lshape(),
            Domain::SquareGrid(n) => square_grid(n),
        }
    }

    pub fn area(self) -> f64 {
        match self {
            Domain::Square | Domain::SquareGrid(_) => 1.0,
            Domain::LShape => 3.0,
        }
    }

    /// Whether `p` lies on the domain boundary (up to `tol`).
    pub fn on_boundary(self, p: Point, tol: f64) -> bool {
        let [x, y] = p;
        match self {
            Domain::Square | Domain::SquareGrid(_) => {
                x.abs() <= tol || (x - 1.0).abs() <= tol || y.abs() <= tol || (y - 1.0).abs() <= tol
            }
            Domain::LShape => {
                (x + 1.0).abs() <= tol
                    || (y - 1.0).abs() <= tol
                    || (y + 1.0).abs() <= tol && x <= tol
                    || (x - 1.0).abs() <= tol && y >= -tol
                    || x.abs() <= tol && y <= tol
                    || y.abs() <= tol && x >= -tol
            }
        }
    }
}

/// Unit square split along the diagonal `(0,0)-(1,1)`, which is the
/// refinement edge of both triangles.
pub fn square() -> Mesh {
    let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    Mesh::new(v, vec![[0, 2, 3], [2, 0, 1]]).expect("static mesh is valid")
}

/// L-shape as six right isosceles triangles around the re-entrant corner,
/// hypotenuses on the diagonals through the origin.
pub fn lshape() -> Mesh {
    let v = vec![
        [0.0, 0.0],
        [1.0, 0.0],
        [1.0, 1.0],
        [0.0, 1.0],
        [-1.0, 1.0],
        [-1.0, 0.0],
        [-1.0, -1.0],
        [0.0, -1.0],
    ];
    let t = vec![[0, 2, 3], [2, 0, 1], [4, 0, 3], [0, 4, 5], [6, 0, 5], [0, 6, 7]];
    Mesh::new(v, t).expect("static mesh is valid")
}

/// Uniform `n x n` grid on the unit square, each cell cut along its
/// `(i,j)-(i+1,j+1)` diagonal.
pub fn square_grid(n: usize) -> Mesh {
    assert!(n >= 1);
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            v.push([i as f64 * h, j as f64 * h]);
        }
    }
    let mut t = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            t.push([a, c, d]);
            t.push([c, a, b]);
        }
    }
    Mesh::new(v, t).expect("grid mesh is valid")
}
