//! Symmetric 12-point triangle rule, degree of exactness 6 (Dunavant).

/// Quadrature on the reference triangle in barycentric coordinates.
///
/// Weights are normalized to sum to one, so `∫_T g ≈ |T| Σ w_q g(x_q)`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

pub const DEGREE6_POINTS: usize = 12;

impl QuadratureRule {
    #[allow(clippy::excessive_precision)]
    pub fn degree6() -> Self {
        let mut points = Vec::with_capacity(DEGREE6_POINTS);
        let mut weights = Vec::with_capacity(DEGREE6_POINTS);
        let mut orbit3 = |a: f64, b: f64, w: f64| {
            for p in [[b, a, a], [a, b, a], [a, a, b]] {
                points.push(p);
                weights.push(w);
            }
        };
        orbit3(
            0.063_089_014_491_502_23,
            0.873_821_971_016_995_5,
            0.050_844_906_370_206_82,
        );
        orbit3(
            0.249_286_745_170_910_43,
            0.501_426_509_658_179_1,
            0.116_786_275_726_379_37,
        );
        let (a, b, c) = (
            0.053_145_049_844_816_947,
            0.310_352_451_033_784_4,
            0.636_502_499_121_398_7,
        );
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            points.push(p);
            weights.push(0.082_851_075_618_373_57);
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Physical quadrature points of the triangle with corners `p`.
    pub fn map(&self, p: &[[f64; 2]; 3]) -> impl Iterator<Item = [f64; 2]> + '_ {
        let p = *p;
        self.points.iter().map(move |l| {
            [
                l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
                l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
            ]
        })
    }
}
