//! Orthogonal modal basis on the reference interval [-1/2, 1/2], Gauss
//! quadrature rules and barycentric differentiation matrices.

use crate::error::{MhdError, Result};

/// Highest polynomial degree of the 1-D basis. The RT space at k = 3 needs
/// degree k + 1 = 4 in the normal direction.
pub const MAX_BASIS_DEGREE: usize = 4;

/// Exact masses m_i = ∫ φ_i² over the reference interval.
pub const MASS: [f64; 5] = [
    1.0,
    1.0 / 12.0,
    1.0 / 180.0,
    1.0 / 2800.0,
    1.0 / 44100.0,
];

/// Values φ_i(1/2); φ_i(-1/2) = (-1)^i φ_i(1/2).
pub const EDGE_VALUE: [f64; 5] = [1.0, 0.5, 1.0 / 6.0, 1.0 / 20.0, 1.0 / 70.0];

/// Expansion of derivatives in the basis: φ_i' = Σ_p DERIV[i][p] φ_p.
pub const DERIV: [[f64; 5]; 5] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 2.0, 0.0, 0.0, 0.0],
    [0.1, 0.0, 3.0, 0.0, 0.0],
    [0.0, 6.0 / 35.0, 0.0, 4.0, 0.0],
];

#[inline]
pub(crate) fn phi_raw(i: usize, x: f64) -> f64 {
    let x2 = x * x;
    match i {
        0 => 1.0,
        1 => x,
        2 => x2 - 1.0 / 12.0,
        3 => x * (x2 - 3.0 / 20.0),
        4 => x2 * x2 - (3.0 / 14.0) * x2 + 3.0 / 560.0,
        _ => unreachable!("basis index {i} out of range"),
    }
}

#[inline]
pub(crate) fn dphi_raw(i: usize, x: f64) -> f64 {
    let x2 = x * x;
    match i {
        0 => 0.0,
        1 => 1.0,
        2 => 2.0 * x,
        3 => 3.0 * x2 - 3.0 / 20.0,
        4 => 4.0 * x2 * x - (3.0 / 7.0) * x,
        _ => unreachable!("basis index {i} out of range"),
    }
}

fn check_index(i: usize) -> Result<()> {
    if i > MAX_BASIS_DEGREE {
        return Err(MhdError::Domain(format!(
            "basis index {i} exceeds maximum degree {MAX_BASIS_DEGREE}"
        )));
    }
    Ok(())
}

/// φ_i(ξ), the monic orthogonal polynomial of degree i on [-1/2, 1/2].
pub fn phi(i: usize, xi: f64) -> Result<f64> {
    check_index(i)?;
    Ok(phi_raw(i, xi))
}

/// Derivative φ_i'(ξ).
pub fn dphi(i: usize, xi: f64) -> Result<f64> {
    check_index(i)?;
    Ok(dphi_raw(i, xi))
}

/// m_i = ∫ φ_i².
pub fn mass(i: usize) -> Result<f64> {
    check_index(i)?;
    Ok(MASS[i])
}

/// φ_i at an edge: `side = +1` for ξ = 1/2, `-1` for ξ = -1/2.
#[inline]
pub fn edge_value(i: usize, side: i32) -> f64 {
    if side < 0 && i % 2 == 1 {
        -EDGE_VALUE[i]
    } else {
        EDGE_VALUE[i]
    }
}

/// The basis as a value type, for callers that prefer a handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basis1D {
    pub degree_max: usize,
}

impl Default for Basis1D {
    fn default() -> Self {
        Basis1D {
            degree_max: MAX_BASIS_DEGREE,
        }
    }
}

impl Basis1D {
    pub fn value(&self, i: usize, xi: f64) -> Result<f64> {
        phi(i, xi)
    }

    pub fn derivative(&self, i: usize, xi: f64) -> Result<f64> {
        dphi(i, xi)
    }

    /// All basis values at ξ up to `degree_max`.
    pub fn values(&self, xi: f64) -> [f64; 5] {
        std::array::from_fn(|i| phi_raw(i, xi))
    }

    pub fn derivatives(&self, xi: f64) -> [f64; 5] {
        std::array::from_fn(|i| dphi_raw(i, xi))
    }
}

/// Quadrature rule on [-1/2, 1/2].
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

// Gauss-Legendre nodes/weights already scaled to [-1/2, 1/2]. Only the
// non-negative half of each symmetric rule is stored.
const GL_HALF: [(&[f64], &[f64]); 8] = [
    (&[0.0], &[1.0]),
    (&[0.2886751345948128822545743902509787], &[0.5]),
    (
        &[0.0, 0.38729833462074168851792653997824],
        &[0.4444444444444444444444444444444444, 0.2777777777777777777777777777777778],
    ),
    (
        &[0.1699905217924281324013328795516223, 0.4305681557970262876119732444464048],
        &[0.3260725774312730713134680253890003, 0.1739274225687269286865319746109997],
    ),
    (
        &[0.0, 0.2692346550528415455181572103501044, 0.4530899229693319963988134391496965],
        &[
            0.2844444444444444444444444444444444,
            0.2393143352496832340206457574178191,
            0.1184634425280945437571320203599587,
        ],
    ),
    (
        &[
            0.119309593041598454315250860840356,
            0.3306046932331322568306997975099527,
            0.4662347571015760139061507772469973,
        ],
        &[
            0.2339569672863455236949351719947755,
            0.1803807865240693037849167569188581,
            0.08566224618958517252014807108636645,
        ],
    ),
    (
        &[
            0.0,
            0.2029225756886985834533032060384807,
            0.3707655927996972199319323866403942,
            0.4745539561713792622630948420239256,
        ],
        &[
            0.2089795918367346938775510204081633,
            0.1909150252525594724751848877444876,
            0.1398526957446383339507338857118898,
            0.06474248308443484663530571633954101,
        ],
    ),
    (
        &[
            0.09171732124782490246973807118009199,
            0.2627662049581644929088695245946232,
            0.3983332387068133697957769682379152,
            0.4801449282487681158417804342847365,
        ],
        &[
            0.1813418916891809914825752246385978,
            0.1568533229389436436689811009933007,
            0.1111905172266872352721779972131204,
            0.0506142681451881295762656771549811,
        ],
    ),
];

// Gauss-Lobatto-Legendre, same layout. Index 0 corresponds to n = 2.
const GLL_HALF: [(&[f64], &[f64]); 7] = [
    (&[0.5], &[0.5]),
    (
        &[0.0, 0.5],
        &[0.6666666666666666666666666666666667, 0.1666666666666666666666666666666667],
    ),
    (
        &[0.2236067977499789696409173668731276, 0.5],
        &[0.4166666666666666666666666666666667, 0.08333333333333333333333333333333333],
    ),
    (
        &[0.0, 0.3273268353539885718991462281234292, 0.5],
        &[0.3555555555555555555555555555555556, 0.2722222222222222222222222222222222, 0.05],
    ),
    (
        &[0.1426157582403225481570754970204395, 0.3825276619647323464255014869796691, 0.5],
        &[
            0.2774291885177431765083602625606543,
            0.1892374781489234901583064041060123,
            0.03333333333333333333333333333333333,
        ],
    ),
    (
        &[
            0.0,
            0.2344243967353571069018859409543832,
            0.4151119481392834649360161069837326,
            0.5,
        ],
        &[
            0.2438095238095238095238095238095238,
            0.2158726906049313117089355111406811,
            0.1384130236807829740053502031450331,
            0.02380952380952380952380952380952381,
        ],
    ),
    (
        &[
            0.1046496089512394343843286301726756,
            0.2958500907165711510722553656989766,
            0.4358700742548033076687228806103317,
            0.5,
        ],
        &[
            0.2062293973293519407835264857011049,
            0.1705613462417521823821203385538741,
            0.1053521135717530196914960328878782,
            0.01785714285714285714285714285714286,
        ],
    ),
];

fn unfold(n: usize, half: (&[f64], &[f64])) -> Quadrature1D {
    let (xs, ws) = half;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let has_center = n % 2 == 1;
    for m in (0..xs.len()).rev() {
        if has_center && m == 0 {
            break;
        }
        nodes.push(-xs[m]);
        weights.push(ws[m]);
    }
    for m in 0..xs.len() {
        nodes.push(xs[m]);
        weights.push(ws[m]);
    }
    debug_assert_eq!(nodes.len(), n);
    Quadrature1D { nodes, weights }
}

/// n-point Gauss-Legendre rule on [-1/2, 1/2], exact for degree 2n - 1.
pub fn gauss_legendre(n: usize) -> Result<Quadrature1D> {
    if !(1..=8).contains(&n) {
        return Err(MhdError::Domain(format!(
            "Gauss-Legendre rule with {n} points is not tabulated (1..=8)"
        )));
    }
    Ok(unfold(n, GL_HALF[n - 1]))
}

/// n-point Gauss-Lobatto-Legendre rule on [-1/2, 1/2], exact for degree
/// 2n - 3, endpoints included.
pub fn gauss_lobatto(n: usize) -> Result<Quadrature1D> {
    if !(2..=8).contains(&n) {
        return Err(MhdError::Domain(format!(
            "Gauss-Lobatto rule with {n} points is not tabulated (2..=8)"
        )));
    }
    Ok(unfold(n, GLL_HALF[n - 2]))
}

/// Lagrange differentiation matrix on a set of nodes, built from barycentric
/// weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffMatrix {
    pub n: usize,
    /// Row-major, `d[i * n + j]` = l_j'(ξ_i).
    pub d: Vec<f64>,
    /// Barycentric weights w_j = 1 / Π_{m≠j} (ξ_j - ξ_m).
    pub w: Vec<f64>,
}

impl DiffMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Derivative samples of the interpolant through `f`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n, "sample count must match node count");
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * f[j]).sum())
            .collect()
    }
}

pub fn diff_matrix(nodes: &[f64]) -> Result<DiffMatrix> {
    let n = nodes.len();
    if n == 0 {
        return Err(MhdError::Domain("empty node set".into()));
    }
    let mut w = vec![1.0; n];
    for j in 0..n {
        for m in 0..n {
            if m != j {
                let diff = nodes[j] - nodes[m];
                if diff == 0.0 {
                    return Err(MhdError::Domain(format!(
                        "duplicate nodes at positions {m} and {j}"
                    )));
                }
                w[j] /= diff;
            }
        }
    }
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                row_sum += v;
            }
        }
        d[i * n + i] = -row_sum;
    }
    Ok(DiffMatrix { n, d, w })
}

/// Number of modes per direction for a Q_k cell polynomial.
#[inline]
pub fn n_modes(k: usize) -> usize {
    k + 1
}
