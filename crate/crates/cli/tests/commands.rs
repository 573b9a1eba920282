use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cstar_frames::catalog;
use cstar_frames::frames::{BoundsSpec, FrameSystem};
use cstar_frames::opframes::OperatorFrameSystem;
use cstar_frames::random;
use cstar_frames::{AdjointableOp, AlgebraDescriptor, AlgebraElement, ModuleDescriptor, ModuleElement, C64};
use cstar_frames_cli::schema::{OperatorFile, Problem, ProblemFile, System, VectorFile};
use cstar_frames_cli::{parse_json, to_json, ReportFile, TensorOutput, VerdictJson};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cstar-frames"));
    c.env_remove("CSTAR_FRAMES_SEED");
    c
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("cstar-frames-cli-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, file: &str) -> PathBuf {
        self.0.join(file)
    }

    fn write(&self, file: &str, text: &str) -> PathBuf {
        let p = self.path(file);
        std::fs::write(&p, text).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> ReportFile {
    parse_json(std::str::from_utf8(&out.stdout).unwrap(), "stdout").unwrap()
}

fn problem_text(system: System, bounds: Option<BoundsSpec>) -> String {
    to_json(&ProblemFile::from_problem(&Problem {
        system,
        bounds,
        truncation: None,
    }))
}

fn gen(dir: &Scratch, name: &str, args: &[&str]) -> PathBuf {
    let p = dir.path(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", arg(&p)]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn generated_examples_verify_proved() {
    let dir = Scratch::new("gen");
    for (name, args) in [
        ("star.json", vec!["star-diag", "40"]),
        ("star1.json", vec!["star-diag", "1"]),
        ("ab.json", vec!["gframe-ab"]),
        ("kg.json", vec!["kg-example", "3", "8"]),
        ("sk.json", vec!["star-k-op", "6"]),
        ("gabor.json", vec!["gabor", "8", "2", "2"]),
    ] {
        let p = gen(&dir, name, &args);
        let out = run(&["verify", arg(&p)]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(report(&out).verdict, Some(VerdictJson::Proved), "{name}");
    }
}

#[test]
fn gframe_ab_bounds() {
    let dir = Scratch::new("ab");
    let p = gen(
        &dir,
        "ab.json",
        &["gframe-ab", "1,0.5", "0.3333333333333333,0.3333333333333333"],
    );
    let r = report(&run(&["bounds", arg(&p)]));
    assert!((r.bounds.lower - 2.0 / 9.0).abs() < 1e-12 && (r.bounds.upper - 1.25).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = Scratch::new("exit");
    let p = gen(&dir, "kg.json", &["kg-example", "3", "8"]);
    let mut file: ProblemFile = parse_json(&std::fs::read_to_string(&p).unwrap(), "kg").unwrap();
    file.bounds.as_mut().unwrap().lower = cstar_frames_cli::schema::BoundJson::Scalar(0.5);
    let bad = dir.write("bad.json", &to_json(&file));
    let out = run(&["verify", arg(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r.verdict, Some(VerdictJson::Falsified));
    assert_eq!(r.failed_side.as_deref(), Some("lower"));
    assert!(r.witness.is_some());

    let text = std::fs::read_to_string(&p).unwrap();
    let truncated = dir.write("trunc.json", &text[..text.len() / 2]);
    let out = run(&["verify", arg(&truncated)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    assert_eq!(run(&["verify", arg(&dir.path("missing.json"))]).status.code(), Some(1));
    assert_eq!(run(&["gen", "gabor", "8", "3", "2"]).status.code(), Some(1));
    assert_eq!(run(&["gen", "kg-example", "9", "8"]).status.code(), Some(1));
    // No bounds to verify.
    file.bounds = None;
    file.k_op = None;
    let nb = dir.write("nobounds.json", &to_json(&file));
    assert_eq!(run(&["verify", arg(&nb)]).status.code(), Some(1));
}

#[test]
fn text_format() {
    let dir = Scratch::new("text");
    let p = gen(&dir, "kg.json", &["kg-example"]);
    let out = run(&["verify", arg(&p), "--format", "text"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("verdict: Proved") && s.contains("N = 3, d = 8"));
}

/// A Full-algebra frame with a non-central lower *-bound takes the sampled path, where the
/// structured candidates expose it.
fn sampled_problem() -> String {
    let alg = AlgebraDescriptor::full(2);
    let m = ModuleDescriptor::new(alg, 2);
    let mut rng = random::rng(5);
    let f = random::random_frame(&mut rng, &m, 1);
    let s = f.frame_operator();
    let lo = AlgebraElement::diagonal_real(&[1.0, 0.5])
        .to_full()
        .scale_real(1e-2 * s.min_eigenvalue().sqrt());
    let hi = AlgebraElement::identity(alg).scale_real((s.max_eigenvalue() * 1.5).sqrt());
    problem_text(System::Frame(f), Some(BoundsSpec::star(lo, hi)))
}

#[test]
fn reports_are_deterministic() {
    let dir = Scratch::new("det");
    let p = dir.write("sampled.json", &sampled_problem());
    let a = run(&["verify", arg(&p), "--seed", "9", "--samples", "50"]);
    let b = run(&["verify", arg(&p), "--seed", "9", "--samples", "50"]);
    assert_eq!(a.status.code(), Some(2));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r.verdict, Some(VerdictJson::Falsified));
    assert!(r.samples_used > 0);
    assert_eq!(r.seed, 9);

    let env = bin()
        .args(["verify", arg(&p), "--samples", "50"])
        .env("CSTAR_FRAMES_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);

    let out = dir.path("r.json");
    run(&["verify", arg(&p), "--seed", "9", "--samples", "50", "--out", arg(&out)]);
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn bounds_command() {
    let dir = Scratch::new("bounds");
    let alg = AlgebraDescriptor::diagonal(1);
    let m = ModuleDescriptor::new(alg, 2);
    let e1 = ModuleElement::basis(m, 0);
    let e2 = ModuleElement::basis(m, 1);
    let p = dir.write(
        "e.json",
        &problem_text(
            System::Frame(FrameSystem::new(m, vec![e1.clone(), e2, e1]).unwrap()),
            None,
        ),
    );
    let r = report(&run(&["bounds", arg(&p)]));
    assert_eq!((r.bounds.lower, r.bounds.upper, r.bounds.tight), (1.0, 2.0, false));

    let e = catalog::op_tight(20).unwrap();
    let catalog::Payload::OpFrame(of) = e.payload else {
        unreachable!()
    };
    let p = dir.write("tight.json", &problem_text(System::OpFrame(of), None));
    let r = report(&run(&["bounds", arg(&p)]));
    let total: f64 = (1..=20).map(|i| 1.0 / (i * i) as f64).sum();
    assert!(r.bounds.tight && (r.bounds.lower - total).abs() < 1e-12);
}

#[test]
fn duals_verify() {
    let dir = Scratch::new("dual");
    let mut rng = random::rng(8);
    let m = ModuleDescriptor::new(AlgebraDescriptor::full(2), 2);
    let f = random::random_frame(&mut rng, &m, 2);
    let p = dir.write("f.json", &problem_text(System::Frame(f), None));
    for kind in ["canonical", "parseval"] {
        let d = dir.path(&format!("{kind}.json"));
        assert!(run(&["dual", arg(&p), "--kind", kind, "--out", arg(&d)])
            .status
            .success());
        let out = run(&["verify", arg(&d)]);
        assert_eq!(out.status.code(), Some(0), "{kind}");
        if kind == "parseval" {
            let r = report(&out);
            assert!((r.bounds.lower - 1.0).abs() < 1e-10 && (r.bounds.upper - 1.0).abs() < 1e-10);
        }
    }

    let of = random::random_opframe(&mut rng, &m, 2);
    let k = random::gaussian_op(&mut rng, &m, &m)
        .add(&AdjointableOp::scalar(m, C64::new(4.0, 0.0)))
        .unwrap();
    let p = dir.write("of.json", &problem_text(System::OpFrame(of), None));
    let kp = dir.write("k.json", &to_json(&OperatorFile::new(&k)));
    let d = dir.path("kd.json");
    assert!(run(&[
        "dual",
        arg(&p),
        "--kind",
        "k-operator",
        "--k",
        arg(&kp),
        "--out",
        arg(&d)
    ])
    .status
    .success());
    assert_eq!(run(&["verify", arg(&d)]).status.code(), Some(0));
    // Missing --k, and a singular frame operator.
    assert_eq!(run(&["dual", arg(&p), "--kind", "k-operator"]).status.code(), Some(1));
    let e1 = ModuleElement::basis(m, 0);
    let sing = dir.write(
        "sing.json",
        &problem_text(System::Frame(FrameSystem::new(m, vec![e1]).unwrap()), None),
    );
    assert_eq!(run(&["dual", arg(&sing)]).status.code(), Some(1));
}

#[test]
fn reconstruct_command() {
    let dir = Scratch::new("recon");
    let mut rng = random::rng(3);
    let m = ModuleDescriptor::new(AlgebraDescriptor::diagonal(3), 2);
    let f = random::random_frame(&mut rng, &m, 1);
    let p = dir.write("f.json", &problem_text(System::Frame(f.clone()), None));
    let x = random::gaussian_module_element(&mut rng, &m);
    let xp = dir.write("x.json", &to_json(&VectorFile::new(&x)));
    let out = run(&["reconstruct", arg(&p), "--x", arg(&xp)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out).residuals["reconstruction"] <= 1e-10);

    let parseval = f.canonical_parseval(&Default::default()).unwrap();
    let pp = dir.write("p.json", &problem_text(System::Frame(parseval), None));
    assert!(report(&run(&["reconstruct", arg(&pp), "--x", arg(&xp)])).residuals["reconstruction"] <= 1e-10);

    let sing = dir.write(
        "s.json",
        &problem_text(
            System::Frame(FrameSystem::new(m, vec![ModuleElement::basis(m, 0)]).unwrap()),
            None,
        ),
    );
    assert_eq!(
        run(&["reconstruct", arg(&sing), "--x", arg(&xp)]).status.code(),
        Some(1)
    );
}

fn tight(module: ModuleDescriptor, bound: f64) -> OperatorFrameSystem {
    OperatorFrameSystem::new(module, vec![AdjointableOp::scalar(module, C64::new(bound.sqrt(), 0.0))]).unwrap()
}

#[test]
fn tensor_command() {
    let dir = Scratch::new("tensor");
    let ma = ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 1);
    let mb = ModuleDescriptor::new(AlgebraDescriptor::full(2), 1);
    let a = dir.write("a.json", &problem_text(System::OpFrame(tight(ma, 2.0)), None));
    let b = dir.write("b.json", &problem_text(System::OpFrame(tight(mb, 3.0)), None));
    let out = run(&["tensor", arg(&a), arg(&b)]);
    assert_eq!(out.status.code(), Some(0));
    let t: TensorOutput = parse_json(std::str::from_utf8(&out.stdout).unwrap(), "stdout").unwrap();
    assert_eq!(t.report.verdict, Some(VerdictJson::Proved));
    assert!(t.report.bounds.tight && (t.report.bounds.lower - 6.0).abs() < 1e-12);
    let p = dir.path("ab.json");
    assert_eq!(
        run(&["tensor", arg(&a), arg(&b), "--out", arg(&p)]).status.code(),
        Some(0)
    );
    assert_eq!(run(&["verify", arg(&p)]).status.code(), Some(0));

    let id = dir.write("id.json", &problem_text(System::OpFrame(tight(ma, 1.0)), None));
    let out = run(&["tensor", arg(&id), arg(&id)]);
    let t: TensorOutput = parse_json(std::str::from_utf8(&out.stdout).unwrap(), "stdout").unwrap();
    assert_eq!((t.report.bounds.lower, t.report.bounds.upper), (1.0, 1.0));

    // K for the wrong factor.
    let k = dir.write("k.json", &to_json(&OperatorFile::new(&AdjointableOp::identity(mb))));
    assert_eq!(
        run(&["tensor", arg(&a), arg(&b), "--k1", arg(&k)]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["tensor", arg(&a), arg(&b), "--k2", arg(&k)]).status.code(),
        Some(0)
    );
}

#[test]
fn selftest_quick_passes() {
    let out = run(&["selftest", "--quick", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("0 failed") && s.contains("penrose identities"));
}
