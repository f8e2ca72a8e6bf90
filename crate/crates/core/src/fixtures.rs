//! Worked example tuples with their known classifications.

use crate::dilation_data::{gen_compressed_tuple, Conditions, ModelData};
use crate::linalg::{ComplexMatrix, Tolerance};
use crate::tuples::{make_tuple, ContractionTuple};

/// Where the data checked by a fixture's pipeline come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Extracted,
    Stated,
}

/// Full-space unitaries and projections given alongside a fixture.
#[derive(Debug, Clone)]
pub struct StatedData {
    pub u: Vec<ComplexMatrix>,
    pub p: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: &'static str,
    pub summary: &'static str,
    pub matrices: Vec<ComplexMatrix>,
    pub tol: Tolerance,
    pub stated: Option<StatedData>,
    pub conditions: Conditions,
    pub source: Source,
    /// Whether the pipeline's checks pass.
    pub expected_pass: bool,
    /// Named classification outcomes, keyed as in run reports.
    pub expected: Vec<(&'static str, bool)>,
}

impl Fixture {
    pub fn tuple(&self) -> ContractionTuple {
        make_tuple(self.matrices.clone(), self.tol).expect("fixture tuples are valid")
    }
}

pub const IDS: [&str; 8] = [
    "first-eg", "exmp:06", "eg1", "exmp:05", "eg2", "eg3", "last-eg", "bdf-pair",
];

pub fn by_id(id: &str) -> Option<Fixture> {
    Some(match id {
        "first-eg" => first_example(),
        "exmp:06" => exmp_06(),
        "eg1" => eg1(),
        "exmp:05" => exmp_05(),
        "eg2" => eg2(),
        "eg3" => eg3(),
        "last-eg" => last_example(),
        "bdf-pair" => bdf_pair(),
        _ => return None,
    })
}

pub fn all() -> Vec<Fixture> {
    IDS.iter().map(|id| by_id(id).expect("listed id")).collect()
}

fn swap() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

fn coordinate_projection(dim: usize, k: usize) -> ComplexMatrix {
    let mut d = vec![0.0; dim];
    d[k] = 1.0;
    ComplexMatrix::diag_real(&d)
}

/// Two equal nilpotent 2x2 contractions whose data do not commute.
pub fn first_example() -> Fixture {
    let t = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
    Fixture {
        id: "first-eg",
        summary: "T1 = T2 = [[0,1],[0,0]]; dilates with U = swap, P = diag(0,1)",
        matrices: vec![t.clone(), t],
        tol: Tolerance::exact(),
        stated: Some(StatedData {
            u: vec![swap(), swap()],
            p: vec![ComplexMatrix::diag_real(&[0.0, 1.0]); 2],
        }),
        conditions: Conditions::Main,
        source: Source::Extracted,
        expected_pass: true,
        expected: vec![("in_S_n", true), ("in_U_n", true)],
    }
}

fn exmp_06_pair() -> (ComplexMatrix, ComplexMatrix) {
    let s3 = 3f64.sqrt();
    let t1 = ComplexMatrix::from_real_rows(&[
        [0.0, 0.0, 0.0],
        [1.0 / 3.0, 0.0, 0.0],
        [0.0, 1.0 / (3.0 * s3), 0.0],
    ]);
    let t2 = ComplexMatrix::from_real_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [-1.0 / s3, 0.0, 0.0]]);
    (t1, t2)
}

/// Commuting pair with zero product whose forced data violate the
/// defect-matching condition.
pub fn exmp_06() -> Fixture {
    let (t1, t2) = exmp_06_pair();
    Fixture {
        id: "exmp:06",
        summary: "nilpotent pair with T = 0; condition main-4 fails for every candidate",
        matrices: vec![t1, t2],
        tol: Tolerance::exact(),
        stated: None,
        conditions: Conditions::Main,
        source: Source::Extracted,
        expected_pass: false,
        expected: vec![("in_S_n", false), ("in_U_n", false)],
    }
}

/// Coordinate projections of C³: data for (1)-(4) exist, (1)-(5) fail.
pub fn eg1() -> Fixture {
    let ts: Vec<ComplexMatrix> = (0..3).map(|k| coordinate_projection(3, k)).collect();
    let id = ComplexMatrix::identity(3);
    Fixture {
        id: "eg1",
        summary: "T_i = e_i e_i* on C^3; satisfies (1)-(4) with U_i = I, P_i = I - T_i but not (1)-(5)",
        stated: Some(StatedData {
            u: vec![id.clone(); 3],
            p: ts.iter().map(|t| &id - t).collect(),
        }),
        matrices: ts,
        tol: Tolerance::exact(),
        conditions: Conditions::Coromain,
        source: Source::Stated,
        expected_pass: true,
        expected: vec![("in_S_n", false), ("in_U_n", true)],
    }
}

/// Triple in the class (1)-(5) that violates Brehmer positivity.
pub fn exmp_05() -> Fixture {
    let n = ComplexMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]]);
    Fixture {
        id: "exmp:05",
        summary: "T1 = T2 = [[0,0],[1,0]], T3 = I; dilates with minimal product, fails Brehmer",
        matrices: vec![n.clone(), n, ComplexMatrix::identity(2)],
        tol: Tolerance::exact(),
        stated: Some(StatedData {
            u: vec![swap(), swap(), ComplexMatrix::identity(2)],
            p: vec![
                ComplexMatrix::diag_real(&[1.0, 0.0]),
                ComplexMatrix::diag_real(&[1.0, 0.0]),
                ComplexMatrix::zeros(2, 2),
            ],
        }),
        conditions: Conditions::Main,
        source: Source::Extracted,
        expected_pass: true,
        expected: vec![
            ("in_S_n", true),
            ("brehmer", false),
            ("szego_first_order", false),
        ],
    }
}

/// Complementary diagonal projections; all of (1)-(5) hold.
pub fn eg2() -> Fixture {
    let ts = vec![
        ComplexMatrix::diag_real(&[0.0, 1.0, 1.0]),
        ComplexMatrix::diag_real(&[1.0, 0.0, 1.0]),
        ComplexMatrix::diag_real(&[1.0, 1.0, 0.0]),
    ];
    let id = ComplexMatrix::identity(3);
    Fixture {
        id: "eg2",
        summary: "diagonal projections with T = 0; U_i = I, P_i = I - T_i satisfy (1)-(5)",
        stated: Some(StatedData {
            u: vec![id.clone(); 3],
            p: ts.iter().map(|t| &id - t).collect(),
        }),
        matrices: ts,
        tol: Tolerance::exact(),
        conditions: Conditions::Main,
        source: Source::Extracted,
        expected_pass: true,
        expected: vec![("in_S_n", true), ("in_U_n", true)],
    }
}

/// Self-adjoint triple with `T = 0` where no data satisfy (1)-(4).
///
/// The middle operator is the symmetric matrix `1/2 I + 1/3 swap` on the
/// first two coordinates, which commutes with the first operator.
pub fn eg3() -> Fixture {
    let t1 = ComplexMatrix::from_real_rows(&[[0.0, 1.0 / 3.0, 0.0], [1.0 / 3.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
    let t2 = ComplexMatrix::from_real_rows(&[[0.5, 1.0 / 3.0, 0.0], [1.0 / 3.0, 0.5, 0.0], [0.0, 0.0, 0.0]]);
    Fixture {
        id: "eg3",
        summary: "self-adjoint triple with T = 0; the forced U_1 is not unitary",
        matrices: vec![t1, t2, coordinate_projection(3, 2)],
        tol: Tolerance::exact(),
        stated: None,
        conditions: Conditions::Coromain,
        source: Source::Extracted,
        expected_pass: false,
        expected: vec![("in_S_n", false), ("in_U_n", false)],
    }
}

/// The `exmp:06` pair extended by the identity.
pub fn last_example() -> Fixture {
    let (t1, t2) = exmp_06_pair();
    Fixture {
        id: "last-eg",
        summary: "exmp:06 pair plus T3 = I; outside (1)-(5) yet Szego-positive on {1,2} and {2,3}",
        matrices: vec![t1, t2, ComplexMatrix::identity(3)],
        tol: Tolerance::exact(),
        stated: None,
        conditions: Conditions::Main,
        source: Source::Extracted,
        expected_pass: false,
        expected: vec![("in_S_n", false)],
    }
}

/// Non-commuting projection pair: `U_1 = U_2 = H` (Hadamard),
/// `P_1 = diag(1,0)`, `P_2 = H P_1^⊥ H`.
pub fn bdf_pair_data() -> ModelData {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = ComplexMatrix::from_real_rows(&[[h, h], [h, -h]]);
    let p1 = ComplexMatrix::diag_real(&[1.0, 0.0]);
    let p2 = &(&hadamard * &ComplexMatrix::diag_real(&[0.0, 1.0])) * &hadamard.adjoint();
    ModelData {
        u: vec![hadamard.clone(), hadamard.adjoint()],
        p: vec![p1, p2],
    }
}

/// Degree-2 compression of the model pair built from [`bdf_pair_data`].
pub fn bdf_pair() -> Fixture {
    let tol = Tolerance::exact();
    let t = gen_compressed_tuple(&bdf_pair_data(), 2, tol).expect("valid model data");
    Fixture {
        id: "bdf-pair",
        summary: "Hadamard model pair compressed to degree 2; dilates on H^2(D_T*)",
        matrices: t.ops().to_vec(),
        tol,
        stated: None,
        conditions: Conditions::Pure,
        source: Source::Extracted,
        expected_pass: true,
        expected: vec![("pure", true)],
    }
}
