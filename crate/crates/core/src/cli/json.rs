//! JSON documents emitted by the CLI. Field order is fixed by the structs, so
//! output is byte-stable.

use serde::Serialize;

use crate::curve::Curve;
use crate::filtration::FiberData;
use crate::laurent::LaurentPoly;
use crate::pipeline::AnalysisReport;

#[derive(Serialize)]
pub struct BranchJson {
    pub name: String,
    pub multiplicity: u32,
    pub generators: Vec<u32>,
    pub conductor: u32,
}

#[derive(Serialize)]
pub struct TermJson {
    pub exp: Vec<i64>,
    pub coef: i64,
}

#[derive(Serialize)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
}

impl From<&LaurentPoly> for PolyJson {
    fn from(p: &LaurentPoly) -> Self {
        Self {
            terms: p
                .terms()
                .map(|(e, c)| TermJson {
                    exp: e.to_vec(),
                    coef: c,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ZetaJson {
    pub coeffs: Vec<i64>,
}

#[derive(Serialize)]
pub struct ChecksJson {
    pub thm1_eq_thm2: bool,
    pub normalized: bool,
    pub support_in_semigroup: bool,
    pub divisibility: bool,
}

#[derive(Serialize)]
pub struct ReportJson {
    pub r: usize,
    pub branches: Vec<BranchJson>,
    pub intersection: Vec<Vec<u32>>,
    pub delta: Vec<u32>,
    pub alexander: PolyJson,
    pub zeta: ZetaJson,
    pub checks: ChecksJson,
}

fn branches(curve: &Curve) -> Vec<BranchJson> {
    (0..curve.num_branches())
        .map(|i| BranchJson {
            name: curve.branch_name(i),
            multiplicity: curve.multiplicities()[i],
            generators: curve.semigroup(i).generators.clone(),
            conductor: curve.semigroup(i).conductor,
        })
        .collect()
}

pub fn emit_json(report: &AnalysisReport) -> String {
    let doc = ReportJson {
        r: report.r,
        branches: report
            .branches
            .iter()
            .map(|b| BranchJson {
                name: b.name.clone(),
                multiplicity: b.multiplicity,
                generators: b.generators.clone(),
                conductor: b.conductor,
            })
            .collect(),
        intersection: report.intersection.clone(),
        delta: report.delta.clone(),
        alexander: (&report.alexander).into(),
        zeta: ZetaJson {
            coeffs: report.zeta.clone(),
        },
        checks: ChecksJson {
            thm1_eq_thm2: report.checks.thm1_eq_thm2,
            normalized: report.checks.normalized,
            support_in_semigroup: report.checks.support_in_semigroup,
            divisibility: report.checks.divisibility,
        },
    };
    serde_json::to_string(&doc).expect("serializable")
}

#[derive(Serialize)]
pub struct SemigroupJson {
    pub r: usize,
    pub branches: Vec<BranchJson>,
    pub intersection: Vec<Vec<u32>>,
    pub delta: Vec<u32>,
}

pub fn semigroup_json(curve: &Curve) -> String {
    serde_json::to_string(&SemigroupJson {
        r: curve.num_branches(),
        branches: branches(curve),
        intersection: curve.intersection_matrix().to_vec(),
        delta: curve.delta().to_vec(),
    })
    .expect("serializable")
}

#[derive(Serialize)]
pub struct FiberJson {
    pub v: Vec<i64>,
    pub c: u32,
    pub d: Vec<u32>,
    pub member: bool,
    pub chi: i64,
}

pub fn fibers_json(table: &[FiberData]) -> String {
    let rows: Vec<FiberJson> = table
        .iter()
        .map(|f| FiberJson {
            v: f.v.0.clone(),
            c: f.dim,
            d: f.subspace_dims.clone(),
            member: f.member,
            chi: f.euler,
        })
        .collect();
    serde_json::to_string(&serde_json::json!({ "fibers": rows })).expect("serializable")
}

#[derive(Serialize)]
pub struct EquationJson {
    pub name: String,
    pub equation: String,
}

pub fn implicit_json(curve: &Curve) -> String {
    let eqs: Vec<EquationJson> = (0..curve.num_branches())
        .map(|i| EquationJson {
            name: curve.branch_name(i),
            equation: curve.equation(i).to_string(),
        })
        .collect();
    serde_json::to_string(&serde_json::json!({
        "branches": eqs,
        "product": curve.equation_product().to_string(),
    }))
    .expect("serializable")
}

#[derive(Serialize)]
pub struct ErrorJson<'a> {
    pub kind: &'a str,
    pub message: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

pub fn error_json(err: &ErrorJson<'_>) -> String {
    serde_json::to_string(&serde_json::json!({ "error": err })).expect("serializable")
}
