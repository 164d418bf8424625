use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::OracleError;

pub type Rational = BigRational;

fn q(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Converts a finite float to the rational it represents exactly.
pub fn exact(x: f64) -> Result<Rational, OracleError> {
    BigRational::from_float(x).ok_or(OracleError::NonFinite(x))
}

/// Half-plane `⟨normal, x⟩ + offset ≥ 0` with a primitive integer normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: [i64; 2],
    pub offset: Rational,
}

impl Facet {
    fn eval(&self, p: &[Rational; 2]) -> Rational {
        q(self.normal[0]) * &p[0] + q(self.normal[1]) * &p[1] + &self.offset
    }
}

/// Convex lattice polygon given by its vertices in counter-clockwise order;
/// facet `i` joins vertex `i` to vertex `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeData {
    vertices: Vec<[Rational; 2]>,
    facets: Vec<Facet>,
}

impl PolytopeData {
    /// `[0, width] × [0, height]`.
    pub fn rectangle(width: Rational, height: Rational) -> Result<Self, OracleError> {
        if !width.is_positive() || !height.is_positive() {
            return Err(OracleError::Degenerate(format!(
                "rectangle {width} x {height}"
            )));
        }
        let z = Rational::zero();
        let vertices = vec![
            [z.clone(), z.clone()],
            [width.clone(), z.clone()],
            [width.clone(), height.clone()],
            [z.clone(), height.clone()],
        ];
        let facets = vec![
            Facet { normal: [0, 1], offset: z.clone() },
            Facet { normal: [-1, 0], offset: width },
            Facet { normal: [0, -1], offset: height },
            Facet { normal: [1, 0], offset: z },
        ];
        Ok(Self { vertices, facets })
    }

    /// `0 ≤ x ≤ 1`, `0 ≤ y ≤ base + twist·x`: the Hirzebruch trapezoid.
    pub fn trapezoid(twist: i64, base: Rational) -> Result<Self, OracleError> {
        if twist < 0 || !base.is_positive() {
            return Err(OracleError::Degenerate(format!(
                "trapezoid twist {twist}, base {base}"
            )));
        }
        let z = Rational::zero();
        let one = Rational::one();
        let vertices = vec![
            [z.clone(), z.clone()],
            [one.clone(), z.clone()],
            [one.clone(), &base + q(twist)],
            [z.clone(), base.clone()],
        ];
        let facets = vec![
            Facet { normal: [0, 1], offset: z.clone() },
            Facet { normal: [-1, 0], offset: one },
            Facet { normal: [twist, -1], offset: base },
            Facet { normal: [1, 0], offset: z },
        ];
        Ok(Self { vertices, facets })
    }

    /// Moment polygon of `ω + kβ` for the twisted family with fibre length 1,
    /// horizontal offset `b` and base scale `kappa`.
    pub fn for_class(twist: u32, b: f64, kappa: f64, k: f64) -> Result<Self, OracleError> {
        let base = exact(b)? + exact(kappa)? * exact(k)?;
        if twist == 0 {
            Self::rectangle(Rational::one(), base)
        } else {
            Self::trapezoid(i64::from(twist), base)
        }
    }

    pub fn vertices(&self) -> &[[Rational; 2]] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// True when every vertex satisfies every facet inequality and lies on
    /// exactly its two adjacent facets.
    pub fn is_consistent(&self) -> bool {
        let m = self.vertices.len();
        if m != self.facets.len() || m < 3 {
            return false;
        }
        for (i, v) in self.vertices.iter().enumerate() {
            for (j, f) in self.facets.iter().enumerate() {
                let e = f.eval(v);
                let adjacent = j == i || (j + 1) % m == i;
                if e.is_negative() || (adjacent != e.is_zero()) {
                    return false;
                }
            }
        }
        true
    }

    /// Lattice length of facet `i`.
    pub fn facet_measure(&self, i: usize) -> Rational {
        let m = self.vertices.len();
        let v = &self.vertices[i];
        let w = &self.vertices[(i + 1) % m];
        let n = self.facets[i].normal;
        let (ux, uy) = (q(n[1]), q(-n[0]));
        let ex = &w[0] - &v[0];
        let ey = &w[1] - &v[1];
        (ex * &ux + ey * &uy) / (&ux * &ux + &uy * &uy)
    }

    pub fn volume(&self) -> Rational {
        let m = self.vertices.len();
        let mut twice = Rational::zero();
        for i in 0..m {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % m];
            twice += &a[0] * &b[1] - &b[0] * &a[1];
        }
        twice / q(2)
    }

    pub fn boundary_volume(&self) -> Rational {
        (0..self.facets.len()).map(|i| self.facet_measure(i)).sum()
    }

    /// `∫_P f dμ` for affine `f`.
    pub fn integrate(&self, f: &AffineFunction) -> Rational {
        let m = self.vertices.len();
        let o = &self.vertices[0];
        let mut total = Rational::zero();
        for i in 1..m - 1 {
            let a = &self.vertices[i];
            let b = &self.vertices[i + 1];
            let area = ((&a[0] - &o[0]) * (&b[1] - &o[1]) - (&b[0] - &o[0]) * (&a[1] - &o[1]))
                / q(2);
            let cx = (&o[0] + &a[0] + &b[0]) / q(3);
            let cy = (&o[1] + &a[1] + &b[1]) / q(3);
            total += area * f.eval(&cx, &cy);
        }
        total
    }

    /// `∫_{∂P} f dσ` for affine `f`.
    pub fn integrate_boundary(&self, f: &AffineFunction) -> Rational {
        let m = self.vertices.len();
        let mut total = Rational::zero();
        for i in 0..m {
            let v = &self.vertices[i];
            let w = &self.vertices[(i + 1) % m];
            let mx = (&v[0] + &w[0]) / q(2);
            let my = (&v[1] + &w[1]) / q(2);
            total += self.facet_measure(i) * f.eval(&mx, &my);
        }
        total
    }
}

/// `constant + x·μ₁ + y·μ₂` with exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFunction {
    pub constant: Rational,
    pub x: Rational,
    pub y: Rational,
}

impl AffineFunction {
    pub fn new(constant: Rational, x: Rational, y: Rational) -> Self {
        Self { constant, x, y }
    }

    /// Linear function `a₁μ₁ + a₂μ₂` of a torus generator.
    pub fn generator(a1: i64, a2: i64) -> Self {
        Self::new(Rational::zero(), q(a1), q(a2))
    }

    /// Builds from monomials `coef · μ₁^i μ₂^j`; anything of total degree above
    /// one is rejected.
    pub fn from_terms(terms: &[(u32, u32, Rational)]) -> Result<Self, OracleError> {
        let mut f = Self::new(Rational::zero(), Rational::zero(), Rational::zero());
        for (i, j, c) in terms {
            match (i, j) {
                (0, 0) => f.constant += c,
                (1, 0) => f.x += c,
                (0, 1) => f.y += c,
                _ => return Err(OracleError::NonAffine { degree: i + j }),
            }
        }
        Ok(f)
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        &self.constant + &self.x * x + &self.y * y
    }

    /// The same function shifted to mean zero on `p`.
    pub fn centred(&self, p: &PolytopeData) -> Self {
        let mean = p.integrate(self) / p.volume();
        Self::new(&self.constant - mean, self.x.clone(), self.y.clone())
    }
}
