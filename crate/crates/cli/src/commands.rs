use clap::Subcommand;
use serde_json::Value;

use hyperkos::areas::{area_bk2, area_ch1, polygon_area_ch1, AreaReport};
use hyperkos::assembly::{
    assemble_v1, assemble_v2, assemble_v3, q1_from_triangles, q2_gate, tetra_gate, third_triangle_disk, AssemblyVerdict,
    CoherenceScheme, MatchedTriangleSet, Witness,
};
use hyperkos::moduli::{congruent, decode, encode, ModuliPoint};
use hyperkos::realhyp::{
    cayley_classify, cayley_p, dihedral_from_vertex, dihedral_gate, dual, gda_check, gva_check, vertex_angles,
    vertex_from_dihedral, AngleCriterion, AngleTriple, CayleyPoint, DihedralAngleMatrix,
};
use hyperkos::rkhs::{alpha, cpp_certify, delta_h, gram_of_config, kos_matrix, quiggin_report, Checked, GramSpec};
use hyperkos::selftest::run_selftest;
use hyperkos::triangles::{
    build_model_triangle, realizable_sdp, realizable_sprime, realize_sprime, sdp_to_sprime, sprime_to_sdp,
    TriangleSDoublePrime, TriangleSPrime,
};
use hyperkos::{PointConfig, Tolerance};

use crate::json::*;

#[derive(Subcommand, Debug, Clone)]
pub enum Verb {
    /// Distances, kos matrix at index 0 and angular invariants of a configuration.
    Invariants,
    /// Moduli coordinates (distances from index 0, kos matrix) of a configuration.
    ModuliEncode,
    /// A configuration with the given moduli coordinates.
    ModuliDecode,
    /// Whether two ordered configurations are congruent.
    Congruent,
    /// Triangle data conversions and realizations.
    Triangle {
        #[command(subcommand)]
        op: TriangleOp,
    },
    /// Tetrahedron gate on three kos values, or on three matched faces.
    TetraGate,
    /// Assemble pieces into one configuration.
    Assemble {
        #[command(subcommand)]
        variation: AssembleOp,
    },
    /// Four-point kernel space from its three-point subspaces through label 1.
    Q2Gate,
    /// Complete Pick property of a Gram matrix.
    CppCertify,
    /// Report on the four-point Quiggin family.
    Quiggin {
        #[arg(long)]
        x: Option<f64>,
    },
    /// Real hyperbolic angle computations.
    RealAngles {
        #[command(subcommand)]
        op: RealOp,
    },
    /// Cayley cubic value and classification of a point.
    Cayley,
    /// Area computations.
    Area {
        #[command(subcommand)]
        op: AreaOp,
    },
    /// Randomized health check.
    Selftest,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum TriangleOp {
    Convert,
    Realize,
    Model,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum AssembleOp {
    V1,
    V2,
    V3,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum RealOp {
    Vertex,
    Dihedral,
    Gva,
    Gda,
    Dual,
    Gate,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum AreaOp {
    Ch1,
    Polygon,
    Bk2,
}

impl Verb {
    /// Verbs that read no document when run singly.
    pub fn needs_input(&self) -> bool {
        !matches!(self, Verb::Selftest | Verb::Quiggin { x: Some(_) })
    }
}

pub struct Ctx {
    pub tol: Tolerance,
    pub seed: u64,
    pub signed_area: bool,
}

pub struct Outcome {
    pub doc: Value,
    pub code: u8,
}

fn ok(doc: Value) -> CliResult<Outcome> {
    Ok(Outcome { doc, code: 0 })
}

fn gate(doc: Value, pass: bool) -> CliResult<Outcome> {
    Ok(Outcome {
        doc,
        code: if pass { 0 } else { 1 },
    })
}

fn b(x: bool) -> Value {
    Value::Bool(x)
}

fn s(x: &str) -> Value {
    Value::String(x.into())
}

fn labels(l: &[usize]) -> Value {
    Value::Array(l.iter().map(|&k| Value::from(k)).collect())
}

fn tol_doc(t: &Tolerance) -> Value {
    obj(vec![("eq", num(t.eq_tol)), ("psd", num(t.psd_tol))])
}

pub fn run(verb: &Verb, input: &Value, ctx: &Ctx) -> CliResult<Outcome> {
    if let Some(v) = input.get("schema") {
        if v.as_str() != Some(SCHEMA) {
            return Err(invalid(format!("unsupported schema {v}")));
        }
    }
    let mut out = dispatch(verb, input, ctx)?;
    if let Value::Object(m) = &mut out.doc {
        m.insert("tolerance".into(), tol_doc(&ctx.tol));
    }
    Ok(out)
}

fn dispatch(verb: &Verb, input: &Value, ctx: &Ctx) -> CliResult<Outcome> {
    let t = &ctx.tol;
    match verb {
        Verb::Invariants => invariants(input, t),
        Verb::ModuliEncode => {
            let x = to_points(field(input, "points")?, t)?;
            ok(doc(moduli_fields(&encode(&x, t)?)))
        }
        Verb::ModuliDecode => {
            let rho = to_real_vec(field(input, "rho")?)?;
            let m = to_hermitian(field(input, "m")?, t)?;
            let dim = match input.get("dim") {
                Some(v) => Some(v.as_u64().ok_or_else(|| invalid("dim must be a positive integer"))? as usize),
                None => None,
            };
            let x = decode(&ModuliPoint::new(to_dvector(&rho), m, t)?, dim, t)?;
            ok(doc(vec![("points", points(&x))]))
        }
        Verb::Congruent => {
            let a = to_points(field(input, "a")?, t)?;
            let bb = to_points(field(input, "b")?, t)?;
            ok(doc(vec![("congruent", b(congruent(&a, &bb, t)?))]))
        }
        Verb::Triangle { op } => triangle(*op, input, t),
        Verb::TetraGate => tetra(input, t),
        Verb::Assemble { variation } => assemble(*variation, input, t),
        Verb::Q2Gate => {
            let grams = array(field(input, "grams")?, "grams")?;
            if grams.len() != 3 {
                return Err(invalid("q2-gate takes three Gram matrices"));
            }
            let g: Vec<GramSpec> = grams.iter().map(|m| Ok(GramSpec::new(to_matrix(m)?, t)?)).collect::<CliResult<_>>()?;
            let scheme = input.get("scheme").map(parse_scheme).transpose()?;
            let v = q2_gate(&[g[0].clone(), g[1].clone(), g[2].clone()], scheme.as_ref(), t)?;
            gate(doc(verdict_fields(&v)), v.feasible)
        }
        Verb::CppCertify => {
            let g = GramSpec::new(to_matrix(field(input, "gram")?)?, t)?;
            let c = cpp_certify(&g, t)?;
            let per: Vec<Value> = c
                .per_base
                .iter()
                .enumerate()
                .map(|(k, v)| obj(vec![("base", Value::from(k)), ("psd", b(v.psd)), ("min_eigenvalue", num(v.min_eigenvalue))]))
                .collect();
            gate(doc(vec![("cpp", b(c.is_cpp)), ("per_base", Value::Array(per))]), c.is_cpp)
        }
        Verb::Quiggin { x } => {
            let x = match x {
                Some(x) => *x,
                None => get_f64(input, "x")?,
            };
            quiggin(x, t)
        }
        Verb::RealAngles { op } => real(*op, input, t),
        Verb::Cayley => {
            let [x, y, z] = to_triple(field(input, "point")?)?;
            let pt = CayleyPoint { x, y, z };
            ok(doc(vec![("p", num(cayley_p(pt))), ("class", s(cayley_classify(pt, t).as_str()))]))
        }
        Verb::Area { op } => area(*op, input, ctx),
        Verb::Selftest => {
            let rep = run_selftest(ctx.seed, t);
            let checks: Vec<Value> = rep
                .checks
                .iter()
                .map(|c| obj(vec![("name", s(c.name)), ("passed", b(c.passed)), ("detail", s(&c.detail))]))
                .collect();
            let passed = rep.passed();
            Ok(Outcome {
                doc: doc(vec![("seed", Value::from(rep.seed)), ("passed", b(passed)), ("checks", Value::Array(checks))]),
                code: if passed { 0 } else { 3 },
            })
        }
    }
}

fn invariants(input: &Value, t: &Tolerance) -> CliResult<Outcome> {
    let x = to_points(field(input, "points")?, t)?;
    let g = gram_of_config(&x);
    let n = x.len();
    let k = if n >= 2 { Some(kos_matrix(&g, 0, t)?) } else { None };
    let mut alphas = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                alphas.push(obj(vec![("indices", labels(&[i, j, l])), ("value", num(alpha(&g, i, j, l)?))]));
            }
        }
    }
    let mut d = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[(i, j)] = delta_h(&g, i, j)?;
            }
        }
    }
    ok(doc(vec![
        ("delta", real_matrix(&d)),
        ("kos", k.map(|k| complex_matrix(k.m.as_dmatrix())).unwrap_or(Value::Null)),
        ("alpha", Value::Array(alphas)),
    ]))
}

fn moduli_fields(m: &ModuliPoint) -> Vec<(&'static str, Value)> {
    vec![
        ("rho", real_vec(m.rho().as_slice())),
        ("m", complex_matrix(m.m().as_dmatrix())),
    ]
}

fn sprime_doc(t: &TriangleSPrime) -> Value {
    obj(vec![("d12", num(t.d12)), ("d13", num(t.d13)), ("d23", num(t.d23)), ("alpha", num(t.alpha123))])
}

fn sdp_doc(t: &TriangleSDoublePrime) -> Value {
    obj(vec![("d12", num(t.d12)), ("d13", num(t.d13)), ("kos", complex(t.kos123))])
}

fn parse_sprime(v: &Value) -> CliResult<TriangleSPrime> {
    Ok(TriangleSPrime::new(get_f64(v, "d12")?, get_f64(v, "d13")?, get_f64(v, "d23")?, get_f64(v, "alpha")?)?)
}

fn parse_sdp(v: &Value) -> CliResult<TriangleSDoublePrime> {
    Ok(TriangleSDoublePrime::new(get_f64(v, "d12")?, get_f64(v, "d13")?, get_complex(v, "kos")?)?)
}

fn triangle(op: TriangleOp, input: &Value, t: &Tolerance) -> CliResult<Outcome> {
    match op {
        TriangleOp::Convert | TriangleOp::Realize => {
            let (sp, sdp, realizable) = if let Some(v) = input.get("sprime") {
                let sp = parse_sprime(v)?;
                let r = realizable_sprime(&sp, t);
                (sp, if r { Some(sprime_to_sdp(&sp, t)?) } else { None }, r)
            } else {
                let sdp = parse_sdp(field(input, "sdp")?)?;
                let r = realizable_sdp(&sdp, t);
                if !r {
                    let d = doc(vec![("realizable", b(false)), ("sdp", sdp_doc(&sdp))]);
                    return if matches!(op, TriangleOp::Realize) { gate(d, false) } else { ok(d) };
                }
                (sdp_to_sprime(&sdp, t)?, Some(sdp), r)
            };
            let mut fields = vec![
                ("realizable", b(realizable)),
                ("sprime", sprime_doc(&sp)),
                ("sdp", sdp.as_ref().map(sdp_doc).unwrap_or(Value::Null)),
            ];
            if matches!(op, TriangleOp::Convert) {
                return ok(doc(fields));
            }
            if realizable {
                fields.push(("points", points(&realize_sprime(&sp, t)?)));
            }
            gate(doc(fields), realizable)
        }
        TriangleOp::Model => {
            let x = to_points(field(input, "points")?, t)?;
            let sdp = TriangleSDoublePrime::from_config(&x, t)?;
            let sp = TriangleSPrime::from_config(&x)?;
            ok(doc(vec![
                ("sprime", sprime_doc(&sp)),
                ("sdp", sdp_doc(&sdp)),
                ("points", points(&build_model_triangle(&sdp, t)?)),
            ]))
        }
    }
}

fn witness_doc(w: &Witness) -> Value {
    match w {
        Witness::Config(x) => obj(vec![("kind", s("config")), ("points", points(x))]),
        Witness::Gram(g) => obj(vec![("kind", s("gram")), ("gram", complex_matrix(g.matrix().as_dmatrix()))]),
        Witness::NegativeMinor { labels: l, value } => {
            obj(vec![("kind", s("negative_minor")), ("labels", labels(l)), ("value", num(*value))])
        }
        Witness::NegativeEigenvalue(v) => obj(vec![("kind", s("negative_eigenvalue")), ("value", num(*v))]),
    }
}

fn verdict_fields(v: &AssemblyVerdict) -> Vec<(&'static str, Value)> {
    let mut f = vec![
        ("feasible", b(v.feasible)),
        ("near_boundary", b(v.near_boundary)),
        ("labels", labels(&v.labels)),
        ("matrix", v.matrix.as_ref().map(|m| complex_matrix(m.as_dmatrix())).unwrap_or(Value::Null)),
        (
            "minors",
            Value::Array(v.minors.iter().map(|(l, x)| obj(vec![("labels", labels(l)), ("value", num(*x))])).collect()),
        ),
        ("witness", witness_doc(&v.witness)),
    ];
    if let Some(c) = &v.conditions {
        f.push((
            "conditions",
            obj(vec![
                ("psd", b(c.psd)),
                ("det", num(c.det)),
                ("polynomial", num(c.polynomial)),
                ("disk_lhs", num(c.disk_lhs)),
                ("disk_rhs", num(c.disk_rhs)),
            ]),
        ));
    }
    if let Some(r) = &v.free_parameters {
        let disks = r.disks.iter().map(|(c, rad)| obj(vec![("center", complex(*c)), ("radius", num(*rad))])).collect();
        f.push((
            "free_parameters",
            obj(vec![
                ("disks", Value::Array(disks)),
                ("c0", num(r.c0)),
                ("c1", complex(r.c1)),
                ("c2", num(r.c2)),
                ("best_z", complex(r.best_z)),
                ("best_det", num(r.best_det)),
                ("used_grid", b(r.used_grid)),
            ]),
        ));
    }
    f
}

fn tetra(input: &Value, t: &Tolerance) -> CliResult<Outcome> {
    let v = if let Some(faces) = input.get("faces") {
        let f = array(faces, "faces")?;
        if f.len() != 3 {
            return Err(invalid("three faces are required"));
        }
        let faces = [parse_sdp(&f[0])?, parse_sdp(&f[1])?, parse_sdp(&f[2])?];
        q1_from_triangles(&MatchedTriangleSet::new(faces, t)?, t)?
    } else {
        let rho = match input.get("rho") {
            Some(r) => Some(to_triple(r)?),
            None => None,
        };
        tetra_gate(get_complex(input, "k23")?, get_complex(input, "k24")?, get_complex(input, "k34")?, rho, t)?
    };
    let mut f = verdict_fields(&v);
    let m = v.matrix.as_ref().expect("gate matrix");
    let (c, r) = third_triangle_disk(m.get(0, 1), m.get(0, 2));
    f.push(("k34_disk", obj(vec![("center", complex(c)), ("radius", num(r))])));
    gate(doc(f), v.feasible)
}

fn parse_scheme(v: &Value) -> CliResult<CoherenceScheme> {
    let pieces = array(v, "scheme")?
        .iter()
        .map(|p| {
            array(p, "scheme piece")?
                .iter()
                .map(|l| l.as_u64().map(|x| x as usize).ok_or_else(|| invalid("labels are positive integers")))
                .collect::<CliResult<Vec<usize>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CoherenceScheme::new(pieces)?)
}

fn assemble(op: AssembleOp, input: &Value, t: &Tolerance) -> CliResult<Outcome> {
    let v = match op {
        AssembleOp::V1 => {
            let tris = array(field(input, "triangles")?, "triangles")?.iter().map(parse_sdp).collect::<CliResult<Vec<_>>>()?;
            assemble_v1(&tris, &parse_scheme(field(input, "scheme")?)?, t)?
        }
        AssembleOp::V2 => {
            let facets = array(field(input, "facets")?, "facets")?
                .iter()
                .map(|f| to_points(f, t))
                .collect::<CliResult<Vec<PointConfig>>>()?;
            assemble_v2(&facets, &parse_scheme(field(input, "scheme")?)?, t)?
        }
        AssembleOp::V3 => assemble_v3(&to_points(field(input, "a")?, t)?, &to_points(field(input, "b")?, t)?, t)?,
    };
    gate(doc(verdict_fields(&v)), v.feasible)
}

fn checked(c: &Checked) -> Value {
    obj(vec![("computed", num(c.computed)), ("formula", num(c.formula)), ("rel_err", num(c.rel_err()))])
}

fn quiggin(x: f64, t: &Tolerance) -> CliResult<Outcome> {
    let r = quiggin_report(x, t)?;
    ok(doc(vec![
        ("x", num(x)),
        ("gram", complex_matrix(r.gram.matrix().as_dmatrix())),
        ("leading_minors", Value::Array(r.leading_minors.iter().map(checked).collect())),
        ("det_j", Value::Array(r.det_j.iter().map(checked).collect())),
        ("det_mq", checked(&r.det_mq)),
        ("subspace_cpp", Value::Array(r.subspace_cpp.iter().map(|&c| b(c)).collect())),
        ("cpp", b(r.full_cpp)),
    ]))
}

fn criterion_doc(c: &AngleCriterion) -> Vec<(&'static str, Value)> {
    vec![
        ("holds", b(c.holds)),
        ("simple", b(c.simple)),
        ("psd", b(c.psd)),
        ("det", num(c.det)),
        ("near_boundary", b(c.near_boundary)),
    ]
}

fn real(op: RealOp, input: &Value, t: &Tolerance) -> CliResult<Outcome> {
    match op {
        RealOp::Vertex => {
            let x = to_points(field(input, "points")?, t)?;
            let m = vertex_angles(&x, t)?;
            let c = m.cosines();
            let va = m.angles(t)?;
            let da = AngleTriple::new(va).ok().map(|a| dihedral_from_vertex(&a, t)).transpose()?;
            ok(doc(vec![
                ("matrix", real_matrix(&nalgebra::DMatrix::from_fn(3, 3, |i, j| m.rows()[i][j]))),
                ("cosines", real_vec(&c)),
                ("angles", real_vec(&va)),
                ("cos_dihedral", da.map(|d| real_vec(&d)).unwrap_or(Value::Null)),
            ]))
        }
        RealOp::Dihedral => {
            if let Some(v) = input.get("vertex_angles") {
                let va = AngleTriple::new(to_triple(v)?)?;
                let cd = dihedral_from_vertex(&va, t)?;
                let realizable = cd.iter().all(|c| c.abs() <= 1.0 + t.eq_tol);
                let angles = realizable.then(|| cd.map(|c| c.clamp(-1.0, 1.0).acos()));
                ok(doc(vec![
                    ("cos_dihedral", real_vec(&cd)),
                    ("dihedral_angles", angles.map(|a| real_vec(&a)).unwrap_or(Value::Null)),
                    ("realizable", b(realizable)),
                ]))
            } else {
                let da = AngleTriple::new(to_triple(field(input, "dihedral_angles")?)?)?;
                let cv = vertex_from_dihedral(&da, t)?;
                let realizable = cv.iter().all(|c| c.abs() <= 1.0 + t.eq_tol);
                ok(doc(vec![("cos_vertex", real_vec(&cv)), ("realizable", b(realizable))]))
            }
        }
        RealOp::Gva => ok(doc(criterion_doc(&gva_check(&AngleTriple::new(to_triple(field(input, "angles")?)?)?, t)?))),
        RealOp::Gda => ok(doc(criterion_doc(&gda_check(&AngleTriple::new(to_triple(field(input, "angles")?)?)?, t)?))),
        RealOp::Dual => {
            let g = AngleTriple::new(to_triple(field(input, "angles")?)?)?;
            ok(doc(vec![("angles", real_vec(&dual(&g).0))]))
        }
        RealOp::Gate => {
            let l = if let Some(m) = input.get("matrix") {
                let h = to_matrix(m)?;
                if h.nrows() != 3 || h.iter().any(|z| z.im.abs() > t.eq_tol) {
                    return Err(invalid("the dihedral matrix is a real 3x3 matrix"));
                }
                let rows: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| h[(i, j)].re));
                DihedralAngleMatrix::new(rows, t)?
            } else {
                DihedralAngleMatrix::from_angles(&AngleTriple::new(to_triple(field(input, "dihedral_angles")?)?)?)
            };
            let v = dihedral_gate(&l, t)?;
            gate(
                doc(vec![
                    ("feasible", b(v.feasible)),
                    ("near_boundary", b(v.near_boundary)),
                    ("det", num(v.det)),
                    ("trig_lhs", num(v.trig_lhs)),
                    ("trig_rhs", num(v.trig_rhs)),
                ]),
                v.feasible,
            )
        }
    }
}

fn area_fields(r: &AreaReport, signed: bool) -> Vec<(&'static str, Value)> {
    let mut f = vec![("area", num(if signed { r.signed } else { r.area }))];
    if signed {
        f.push(("kos_expression", num(r.kos_expression)));
        f.push(("kernel_expression", num(r.kernel_expression)));
    }
    f
}

fn area(op: AreaOp, input: &Value, ctx: &Ctx) -> CliResult<Outcome> {
    let t = &ctx.tol;
    let x = to_points(field(input, "points")?, t)?;
    match op {
        AreaOp::Ch1 => ok(doc(area_fields(&area_ch1(&x, t)?, ctx.signed_area))),
        AreaOp::Polygon => ok(doc(area_fields(&polygon_area_ch1(&x, t)?, ctx.signed_area))),
        AreaOp::Bk2 => ok(doc(vec![("area", num(area_bk2(&x, t)?))])),
    }
}
