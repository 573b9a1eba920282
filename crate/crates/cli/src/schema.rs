//! JSON forms of the domain objects. Complex numbers are `[re, im]`, Full elements are
//! row-major nested arrays, Diagonal elements flat arrays of their diagonal.

use cstar_frames::frames::{Bound, BoundsMode, BoundsSpec, FrameSystem};
use cstar_frames::gframes::GFrameSystem;
use cstar_frames::opframes::OperatorFrameSystem;
use cstar_frames::{
    AdjointableOp, AlgebraDescriptor, AlgebraElement, AlgebraKind, ModuleDescriptor, ModuleElement, C64,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: &str = "1";

pub type Complex = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindJson {
    Full,
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub kind: KindJson,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleJson {
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Diagonal(Vec<Complex>),
    Full(Vec<Vec<Complex>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundJson {
    Scalar(f64),
    Element(ElementJson),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeJson {
    Plain,
    K,
    Star,
    StarK,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsJson {
    pub mode: ModeJson,
    pub lower: BoundJson,
    pub upper: BoundJson,
}

/// An operator from the problem module (rank m) to a module of rank `codomain_rank`,
/// given by its m × codomain_rank coefficient matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain_rank: Option<usize>,
    pub coeffs: Vec<Vec<ElementJson>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PayloadJson {
    Frame { vectors: Vec<Vec<ElementJson>> },
    Gframe { ops: Vec<OpJson> },
    Opframe { ops: Vec<OpJson> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: String,
    pub algebra: AlgebraJson,
    pub module: ModuleJson,
    pub payload: PayloadJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_op: Option<OpJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<String>,
}

/// A single endomorphism, used for `--k`, `--k1` and `--k2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub version: String,
    pub algebra: AlgebraJson,
    pub module: ModuleJson,
    pub op: OpJson,
}

/// A module element, used for `--x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub version: String,
    pub algebra: AlgebraJson,
    pub module: ModuleJson,
    pub x: Vec<ElementJson>,
}

/// Domain form of a parsed problem.
#[derive(Clone, Debug, PartialEq)]
pub enum System {
    Frame(FrameSystem),
    GFrame(GFrameSystem),
    OpFrame(OperatorFrameSystem),
}

impl System {
    pub fn module(&self) -> ModuleDescriptor {
        match self {
            System::Frame(f) => f.module(),
            System::GFrame(g) => g.domain(),
            System::OpFrame(o) => o.module(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            System::Frame(_) => "frame",
            System::GFrame(_) => "gframe",
            System::OpFrame(_) => "opframe",
        }
    }

    pub fn operator(&self) -> &AdjointableOp {
        match self {
            System::Frame(f) => f.frame_operator(),
            System::GFrame(g) => g.gframe_operator(),
            System::OpFrame(o) => o.opframe_operator(),
        }
    }

    pub fn as_gframe(&self) -> GFrameSystem {
        match self {
            System::Frame(f) => GFrameSystem::from_frame(f),
            System::GFrame(g) => g.clone(),
            System::OpFrame(o) => o.as_gframe(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub system: System,
    pub bounds: Option<BoundsSpec>,
    pub truncation: Option<String>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

pub fn check_version(v: &str) -> Result<(), CliError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(invalid(format!(
            "unsupported format version {v:?}, expected {FORMAT_VERSION:?}"
        )))
    }
}

impl AlgebraJson {
    pub fn from_descriptor(a: AlgebraDescriptor) -> Self {
        let kind = match a.kind {
            AlgebraKind::Full => KindJson::Full,
            AlgebraKind::Diagonal => KindJson::Diagonal,
        };
        Self { kind, n: a.n }
    }

    pub fn descriptor(&self) -> Result<AlgebraDescriptor, CliError> {
        if self.n == 0 {
            return Err(invalid("algebra dimension must be at least 1"));
        }
        Ok(match self.kind {
            KindJson::Full => AlgebraDescriptor::full(self.n),
            KindJson::Diagonal => AlgebraDescriptor::diagonal(self.n),
        })
    }
}

fn module_of(algebra: &AlgebraJson, module: &ModuleJson) -> Result<ModuleDescriptor, CliError> {
    if module.rank == 0 {
        return Err(invalid("module rank must be at least 1"));
    }
    Ok(ModuleDescriptor::new(algebra.descriptor()?, module.rank))
}

fn c64(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

fn pair(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn element_to_json(a: &AlgebraElement) -> ElementJson {
    let n = a.algebra().n;
    match a.algebra().kind {
        AlgebraKind::Diagonal => ElementJson::Diagonal(a.diagonal_entries().into_iter().map(pair).collect()),
        AlgebraKind::Full => ElementJson::Full((0..n).map(|i| (0..n).map(|j| pair(a.entry(i, j))).collect()).collect()),
    }
}

pub fn element_from_json(e: &ElementJson, alg: AlgebraDescriptor) -> Result<AlgebraElement, CliError> {
    match (alg.kind, e) {
        (AlgebraKind::Diagonal, ElementJson::Diagonal(d)) if d.len() == alg.n => {
            Ok(AlgebraElement::diagonal(d.iter().map(c64).collect()))
        }
        (AlgebraKind::Full, ElementJson::Full(rows))
            if rows.len() == alg.n && rows.iter().all(|r| r.len() == alg.n) =>
        {
            let entries: Vec<C64> = rows.iter().flatten().map(c64).collect();
            Ok(AlgebraElement::full_from_rows(alg.n, &entries))
        }
        // D_1 and M_1 elements are indistinguishable in shape; accept either nesting for n = 1.
        (AlgebraKind::Full, ElementJson::Diagonal(d)) if alg.n == 1 && d.len() == 1 => {
            Ok(AlgebraElement::full_from_rows(1, &[c64(&d[0])]))
        }
        _ => Err(invalid(format!("element does not match algebra {alg}"))),
    }
}

fn check_finite(e: &ElementJson) -> Result<(), CliError> {
    let ok = match e {
        ElementJson::Diagonal(d) => d.iter().flatten().all(|v| v.is_finite()),
        ElementJson::Full(r) => r.iter().flatten().flatten().all(|v| v.is_finite()),
    };
    if ok {
        Ok(())
    } else {
        Err(invalid("non-finite number"))
    }
}

pub fn module_element_to_json(x: &ModuleElement) -> Vec<ElementJson> {
    x.components().iter().map(element_to_json).collect()
}

pub fn module_element_from_json(xs: &[ElementJson], module: ModuleDescriptor) -> Result<ModuleElement, CliError> {
    if xs.len() != module.rank {
        return Err(invalid(format!(
            "vector has {} components, module rank is {}",
            xs.len(),
            module.rank
        )));
    }
    let comps = xs
        .iter()
        .map(|e| {
            check_finite(e)?;
            element_from_json(e, module.algebra)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ModuleElement::new(module, comps)?)
}

pub fn op_to_json(t: &AdjointableOp, with_codomain: bool) -> OpJson {
    OpJson {
        codomain_rank: with_codomain.then_some(t.codomain().rank),
        coeffs: t
            .coeffs()
            .iter()
            .map(|row| row.iter().map(element_to_json).collect())
            .collect(),
    }
}

pub fn op_from_json(op: &OpJson, domain: ModuleDescriptor, default_rank: usize) -> Result<AdjointableOp, CliError> {
    let p = op.codomain_rank.unwrap_or(default_rank);
    if p == 0 {
        return Err(invalid("codomain rank must be at least 1"));
    }
    if op.coeffs.len() != domain.rank || op.coeffs.iter().any(|r| r.len() != p) {
        return Err(invalid(format!("coefficient matrix must be {} × {p}", domain.rank)));
    }
    let coeffs = op
        .coeffs
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    check_finite(e)?;
                    element_from_json(e, domain.algebra)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AdjointableOp::from_coeffs(
        domain,
        ModuleDescriptor::new(domain.algebra, p),
        &coeffs,
    )?)
}

fn bound_to_json(b: &Bound) -> BoundJson {
    match b {
        Bound::Scalar(c) => BoundJson::Scalar(*c),
        Bound::Element(a) => BoundJson::Element(element_to_json(a)),
    }
}

fn scalar(b: &BoundJson) -> Result<f64, CliError> {
    match b {
        BoundJson::Scalar(c) if c.is_finite() => Ok(*c),
        _ => Err(invalid("this bounds mode needs finite scalar bounds")),
    }
}

fn element(b: &BoundJson, alg: AlgebraDescriptor) -> Result<AlgebraElement, CliError> {
    match b {
        BoundJson::Element(e) => {
            check_finite(e)?;
            element_from_json(e, alg)
        }
        BoundJson::Scalar(_) => Err(invalid("star bounds must be algebra elements")),
    }
}

pub fn bounds_to_json(spec: &BoundsSpec) -> (BoundsJson, Option<OpJson>) {
    let mode = match spec.mode {
        BoundsMode::Plain => ModeJson::Plain,
        BoundsMode::K => ModeJson::K,
        BoundsMode::Star => ModeJson::Star,
        BoundsMode::StarK => ModeJson::StarK,
    };
    let b = BoundsJson {
        mode,
        lower: bound_to_json(&spec.lower),
        upper: bound_to_json(&spec.upper),
    };
    (b, spec.k_op.as_ref().map(|k| op_to_json(k, false)))
}

pub fn bounds_from_json(
    b: &BoundsJson,
    k_op: Option<&OpJson>,
    module: ModuleDescriptor,
) -> Result<BoundsSpec, CliError> {
    let alg = module.algebra;
    let k = || -> Result<AdjointableOp, CliError> {
        let k = k_op.ok_or_else(|| invalid("bounds mode needs k_op"))?;
        op_from_json(k, module, module.rank)
    };
    Ok(match b.mode {
        ModeJson::Plain => BoundsSpec::plain(scalar(&b.lower)?, scalar(&b.upper)?),
        ModeJson::K => BoundsSpec::k(scalar(&b.lower)?, scalar(&b.upper)?, k()?),
        ModeJson::Star => BoundsSpec::star(element(&b.lower, alg)?, element(&b.upper, alg)?),
        ModeJson::StarK => BoundsSpec::star_k(element(&b.lower, alg)?, element(&b.upper, alg)?, k()?),
    })
}

impl ProblemFile {
    pub fn from_problem(p: &Problem) -> Self {
        let module = p.system.module();
        let payload = match &p.system {
            System::Frame(f) => PayloadJson::Frame {
                vectors: f.vectors().iter().map(module_element_to_json).collect(),
            },
            System::GFrame(g) => PayloadJson::Gframe {
                ops: g.ops().iter().map(|t| op_to_json(t, true)).collect(),
            },
            System::OpFrame(o) => PayloadJson::Opframe {
                ops: o.ops().iter().map(|t| op_to_json(t, false)).collect(),
            },
        };
        let (bounds, k_op) = match &p.bounds {
            Some(spec) => {
                let (b, k) = bounds_to_json(spec);
                (Some(b), k)
            }
            None => (None, None),
        };
        Self {
            version: FORMAT_VERSION.into(),
            algebra: AlgebraJson::from_descriptor(module.algebra),
            module: ModuleJson { rank: module.rank },
            payload,
            bounds,
            k_op,
            truncation: p.truncation.clone(),
        }
    }

    pub fn to_problem(&self) -> Result<Problem, CliError> {
        check_version(&self.version)?;
        let module = module_of(&self.algebra, &self.module)?;
        let system = match &self.payload {
            PayloadJson::Frame { vectors } => {
                let v = vectors
                    .iter()
                    .map(|x| module_element_from_json(x, module))
                    .collect::<Result<Vec<_>, _>>()?;
                System::Frame(FrameSystem::new(module, v)?)
            }
            PayloadJson::Gframe { ops } => {
                let v = ops
                    .iter()
                    .map(|t| op_from_json(t, module, 1))
                    .collect::<Result<Vec<_>, _>>()?;
                System::GFrame(GFrameSystem::new(module, v)?)
            }
            PayloadJson::Opframe { ops } => {
                if ops.iter().any(|t| t.codomain_rank.is_some_and(|r| r != module.rank)) {
                    return Err(invalid("operator-frame members must be endomorphisms"));
                }
                let v = ops
                    .iter()
                    .map(|t| op_from_json(t, module, module.rank))
                    .collect::<Result<Vec<_>, _>>()?;
                System::OpFrame(OperatorFrameSystem::new(module, v)?)
            }
        };
        let bounds = match &self.bounds {
            Some(b) => Some(bounds_from_json(b, self.k_op.as_ref(), module)?),
            None => None,
        };
        Ok(Problem {
            system,
            bounds,
            truncation: self.truncation.clone(),
        })
    }
}

impl OperatorFile {
    pub fn new(t: &AdjointableOp) -> Self {
        let m = t.domain();
        Self {
            version: FORMAT_VERSION.into(),
            algebra: AlgebraJson::from_descriptor(m.algebra),
            module: ModuleJson { rank: m.rank },
            op: op_to_json(t, false),
        }
    }

    pub fn to_op(&self) -> Result<AdjointableOp, CliError> {
        check_version(&self.version)?;
        let m = module_of(&self.algebra, &self.module)?;
        if self.op.codomain_rank.is_some_and(|r| r != m.rank) {
            return Err(invalid("operator must be an endomorphism"));
        }
        op_from_json(&self.op, m, m.rank)
    }
}

impl VectorFile {
    pub fn new(x: &ModuleElement) -> Self {
        let m = x.module();
        Self {
            version: FORMAT_VERSION.into(),
            algebra: AlgebraJson::from_descriptor(m.algebra),
            module: ModuleJson { rank: m.rank },
            x: module_element_to_json(x),
        }
    }

    pub fn to_element(&self) -> Result<ModuleElement, CliError> {
        check_version(&self.version)?;
        module_element_from_json(&self.x, module_of(&self.algebra, &self.module)?)
    }
}
