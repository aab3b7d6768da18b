//! Command-line front end: curve inspection, isogeny construction and
//! recovery, division polynomials, wp-series, and the arithmetic benchmark
//! ladder. Inputs are JSON (inline or as file paths); results go to stdout,
//! diagnostics to stderr. Exit code 1 marks parse/validation failures and 2
//! marks mathematical failures.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use isogenies::curve::{
    division_polynomial, enumerate_points, make_curve, scalar_mul, short_form,
    two_torsion_polys, CurvePolynomial, Point, RationalMapPair, WeierstrassCurve,
};
use isogenies::field::{
    make_field_seeded, op_count, reset_op_count, Field, FieldElement, DEFAULT_MODULUS_SEED,
};
use isogenies::isogeny::{
    evaluate, from_kernel_general, kohel, velu, Isogeny,
};
use isogenies::poly::Polynomial;
use isogenies::recover::{denominator_to_kernel_poly, dual, naive_search, stark};
use isogenies::series::{
    exp_trunc, reciprocal, wp_series, TruncatedSeries, WpMethod,
};

#[derive(Parser)]
#[command(name = "isogenies", version, about = "Elliptic-curve isogenies over small finite fields")]
struct Cli {
    /// Emit structured JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Print field elements as symmetric representatives in (-p/2, p/2]
    #[arg(long, global = true)]
    balanced: bool,
    /// Seed for randomized steps (extension-modulus generation, benchmarks)
    #[arg(long, global = true, default_value_t = DEFAULT_MODULUS_SEED)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect a curve
    Curve {
        #[command(subcommand)]
        cmd: CurveCmd,
    },
    /// Construct, recover, evaluate, and dualize isogenies
    Isogeny {
        #[command(subcommand)]
        cmd: IsogenyCmd,
    },
    /// Division polynomials psi_m, phi_m, omega_m
    Divpoly {
        /// Curve JSON (inline or a file path)
        curve: String,
        /// Index m
        #[arg(short)]
        m: u64,
    },
    /// Weierstrass wp-function series coefficients
    WpSeries {
        /// Curve JSON (inline or a file path)
        curve: String,
        /// Number of coefficient terms
        #[arg(short)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MethodWp::Recurrence)]
        method: MethodWp,
    },
    /// Operation-count ladders for the series/polynomial kernels
    Bench {
        #[arg(value_enum)]
        op: BenchOp,
        /// Doubling ladder as start:end, e.g. 64:1024
        #[arg(long, default_value = "64:1024")]
        ladder: String,
    },
}

#[derive(Subcommand)]
enum CurveCmd {
    /// Print invariants and (when enumerable) the group order
    Info {
        /// Curve JSON (inline or a file path)
        curve: String,
    },
}

#[derive(Subcommand)]
enum IsogenyCmd {
    /// Velu's formulas from explicit kernel points
    FromPoints {
        curve: String,
        /// Kernel points, e.g. '[[8,3],[8,16],"inf"]'
        #[arg(long)]
        points: String,
    },
    /// Kernel-polynomial construction
    FromKernel {
        curve: String,
        /// Kernel polynomial coefficients, constant first, e.g. '[11,1]'
        #[arg(long)]
        psi: String,
        #[arg(long, value_enum, default_value_t = MethodKernel::Kohel)]
        method: MethodKernel,
    },
    /// Recover kernel polynomials from a (domain, codomain, degree) triple
    Recover {
        e1: String,
        e2: String,
        #[arg(long)]
        degree: u64,
        #[arg(long, value_enum, default_value_t = MethodRecover::Stark)]
        method: MethodRecover,
        /// Extension-degree bound for the torsion search (naive method)
        #[arg(long, default_value_t = 6)]
        dmax: usize,
    },
    /// Apply an isogeny to a point
    Eval {
        isogeny: String,
        /// Point as '[x,y]' or 'inf'
        #[arg(long)]
        point: String,
    },
    /// Dual isogeny, verified against the scalar map
    Dual {
        isogeny: String,
        /// Extension-degree bound for the torsion search
        #[arg(long, default_value_t = 6)]
        dmax: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodKernel {
    Kohel,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodRecover {
    Stark,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodWp {
    Recurrence,
    Fast,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchOp {
    Mul,
    Recip,
    Exp,
}

/// Exit code 1: malformed input. Exit code 2: well-formed input with no
/// mathematical answer.
enum CliError {
    Parse(String),
    Math(String),
}

impl CliError {
    fn parse<E: std::fmt::Display>(e: E) -> CliError {
        CliError::Parse(e.to_string())
    }
    fn math<E: std::fmt::Display>(e: E) -> CliError {
        CliError::Math(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output { json: cli.json, balanced: cli.balanced };
    match run(cli, &out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(CliError::Math(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}

struct Output {
    json: bool,
    balanced: bool,
}

impl Output {
    fn elem(&self, e: &FieldElement) -> String {
        if self.balanced {
            e.to_balanced_string()
        } else {
            e.to_string()
        }
    }

    /// Polynomial in x with the requested coefficient representatives.
    fn poly(&self, p: &Polynomial) -> String {
        if !self.balanced {
            return p.to_string();
        }
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in p.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut cs = self.elem(c);
            let negative = cs.starts_with('-');
            if negative {
                cs.remove(0);
            }
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let unit = cs == "1";
            let term = match i {
                0 => cs,
                1 if unit => "x".to_string(),
                1 => format!("{}*x", cs),
                _ if unit => format!("x^{}", i),
                _ => format!("{}*x^{}", cs, i),
            };
            out.push_str(&term);
        }
        out
    }

    fn curve_line(&self, e: &WeierstrassCurve) -> String {
        // the Display form already uses canonical representatives; balanced
        // output rebuilds it from the a-invariants
        if !self.balanced {
            return e.to_string();
        }
        let a = e.a_invariants();
        let mut lhs = "y^2".to_string();
        if !a[0].is_zero() {
            let _ = write!(lhs, " + {}*x*y", self.elem(&a[0]));
        }
        if !a[2].is_zero() {
            let _ = write!(lhs, " + {}*y", self.elem(&a[2]));
        }
        let mut rhs = "x^3".to_string();
        for (c, mono) in [(&a[1], "x^2"), (&a[3], "x"), (&a[4], "")] {
            if c.is_zero() {
                continue;
            }
            if mono.is_empty() {
                let _ = write!(rhs, " + {}", self.elem(c));
            } else {
                let _ = write!(rhs, " + {}*{}", self.elem(c), mono);
            }
        }
        format!("{} = {}", lhs, rhs)
    }
}

// ---------------------------------------------------------------------------
// JSON <-> library type conversions
// ---------------------------------------------------------------------------

fn read_json_arg(s: &str) -> Result<Value, CliError> {
    let text = if s.trim_start().starts_with(['{', '[']) {
        s.to_string()
    } else {
        std::fs::read_to_string(s)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {}", s, e)))?
    };
    serde_json::from_str(&text).map_err(CliError::parse)
}

fn elem_from_json(v: &Value, spec: &Field) -> Result<FieldElement, CliError> {
    match v {
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                Ok(FieldElement::from_u64(spec, u))
            } else if let Some(i) = n.as_i64() {
                Ok(FieldElement::from_i64(spec, i))
            } else {
                Err(CliError::Parse(format!("non-integer field element {}", n)))
            }
        }
        Value::Array(items) => {
            let mut coeffs = Vec::with_capacity(items.len());
            for item in items {
                let n = item
                    .as_i64()
                    .ok_or_else(|| CliError::Parse(format!("non-integer coefficient {}", item)))?;
                let p = spec.p() as i64;
                coeffs.push(n.rem_euclid(p) as u64);
            }
            FieldElement::from_coeffs(spec, &coeffs).map_err(CliError::parse)
        }
        other => Err(CliError::Parse(format!("bad field element {}", other))),
    }
}

fn elem_to_json(e: &FieldElement) -> Value {
    if e.spec().degree() == 1 {
        json!(e.coeffs()[0])
    } else {
        json!(e.coeffs())
    }
}

fn poly_from_json(v: &Value, spec: &Field) -> Result<Polynomial, CliError> {
    let items = v
        .as_array()
        .ok_or_else(|| CliError::Parse(format!("expected coefficient list, got {}", v)))?;
    let mut coeffs = Vec::with_capacity(items.len());
    for item in items {
        coeffs.push(elem_from_json(item, spec)?);
    }
    Ok(Polynomial::new(spec, coeffs))
}

fn poly_to_json(p: &Polynomial) -> Value {
    Value::Array(p.coeffs().iter().map(elem_to_json).collect())
}

fn parse_curve(arg: &str, seed: u64) -> Result<(Field, WeierstrassCurve), CliError> {
    let v = read_json_arg(arg)?;
    curve_from_json(&v, seed)
}

fn curve_from_json(v: &Value, seed: u64) -> Result<(Field, WeierstrassCurve), CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::Parse(format!("expected curve object, got {}", v)))?;
    let p = obj
        .get("p")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::Parse("curve object needs a prime \"p\"".into()))?;
    let d = obj.get("d").and_then(Value::as_u64).unwrap_or(1) as usize;
    let modulus: Option<Vec<u64>> = match obj.get("modulus") {
        None => None,
        Some(Value::Array(items)) => {
            let mut m = Vec::with_capacity(items.len());
            for item in items {
                m.push(
                    item.as_u64()
                        .ok_or_else(|| CliError::Parse("bad modulus coefficient".into()))?,
                );
            }
            Some(m)
        }
        Some(other) => return Err(CliError::Parse(format!("bad modulus {}", other))),
    };
    let spec = make_field_seeded(p, d, modulus.as_deref(), seed).map_err(CliError::parse)?;
    let a_val = obj
        .get("a")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Parse("curve object needs \"a\": [a1,a2,a3,a4,a6]".into()))?;
    if a_val.len() != 5 {
        return Err(CliError::Parse(format!(
            "expected 5 a-invariants, got {}",
            a_val.len()
        )));
    }
    let mut a = Vec::with_capacity(5);
    for item in a_val {
        a.push(elem_from_json(item, &spec)?);
    }
    let curve = make_curve(
        &spec,
        [a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone(), a[4].clone()],
    )
    .map_err(CliError::parse)?;
    Ok((spec, curve))
}

fn curve_to_json(e: &WeierstrassCurve) -> Value {
    let spec = e.spec();
    let mut obj = serde_json::Map::new();
    obj.insert("p".into(), json!(spec.p()));
    obj.insert("d".into(), json!(spec.degree()));
    if let Some(m) = spec.modulus() {
        obj.insert("modulus".into(), json!(m));
    }
    obj.insert(
        "a".into(),
        Value::Array(e.a_invariants().iter().map(elem_to_json).collect()),
    );
    Value::Object(obj)
}

fn point_from_json(v: &Value, spec: &Field) -> Result<Point, CliError> {
    match v {
        Value::String(s) if s == "inf" => Ok(Point::Infinity),
        Value::Array(xy) if xy.len() == 2 => Ok(Point::Affine {
            x: elem_from_json(&xy[0], spec)?,
            y: elem_from_json(&xy[1], spec)?,
        }),
        other => Err(CliError::Parse(format!(
            "expected point [x,y] or \"inf\", got {}",
            other
        ))),
    }
}

fn point_to_json(p: &Point) -> Value {
    match p.xy() {
        None => json!("inf"),
        Some((x, y)) => Value::Array(vec![elem_to_json(x), elem_to_json(y)]),
    }
}

fn isogeny_to_json(phi: &Isogeny) -> Value {
    json!({
        "domain": curve_to_json(&phi.domain),
        "codomain": curve_to_json(&phi.codomain),
        "degree": phi.degree,
        "kernel_poly": poly_to_json(&phi.kernel_poly),
        "maps": {
            "p": poly_to_json(&phi.maps.p),
            "q": poly_to_json(&phi.maps.q),
            "n0": poly_to_json(&phi.maps.n0),
            "n1": poly_to_json(&phi.maps.n1),
            "d": poly_to_json(&phi.maps.d),
        },
        "c": elem_to_json(&phi.c),
    })
}

fn parse_isogeny(arg: &str, seed: u64) -> Result<Isogeny, CliError> {
    let v = read_json_arg(arg)?;
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::Parse("expected an isogeny object".into()))?;
    let (spec, domain) = curve_from_json(
        obj.get("domain")
            .ok_or_else(|| CliError::Parse("isogeny object needs \"domain\"".into()))?,
        seed,
    )?;
    let (_, codomain) = curve_from_json(
        obj.get("codomain")
            .ok_or_else(|| CliError::Parse("isogeny object needs \"codomain\"".into()))?,
        seed,
    )?;
    if codomain.spec() != &spec {
        return Err(CliError::Parse("domain and codomain live in different fields".into()));
    }
    let degree = obj
        .get("degree")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::Parse("isogeny object needs \"degree\"".into()))?;
    let kernel_poly = poly_from_json(
        obj.get("kernel_poly")
            .ok_or_else(|| CliError::Parse("isogeny object needs \"kernel_poly\"".into()))?,
        &spec,
    )?;
    let maps = obj
        .get("maps")
        .and_then(Value::as_object)
        .ok_or_else(|| CliError::Parse("isogeny object needs \"maps\"".into()))?;
    let fetch = |k: &str| -> Result<Polynomial, CliError> {
        poly_from_json(
            maps.get(k)
                .ok_or_else(|| CliError::Parse(format!("maps object needs \"{}\"", k)))?,
            &spec,
        )
    };
    let maps = RationalMapPair {
        p: fetch("p")?,
        q: fetch("q")?,
        n0: fetch("n0")?,
        n1: fetch("n1")?,
        d: fetch("d")?,
    };
    let c = match obj.get("c") {
        Some(cv) => elem_from_json(cv, &spec)?,
        None => FieldElement::one(&spec),
    };
    let phi = Isogeny::from_raw_parts(domain, codomain, degree, kernel_poly, maps, c);
    // reject maps that do not land on the stated codomain
    let probe = enumerate_points(&phi.domain)
        .ok()
        .and_then(|pts| pts.into_iter().find(|p| !p.is_infinity()));
    if let Some(p) = probe {
        evaluate(&phi, &p).map_err(|e| CliError::Parse(format!("inconsistent isogeny: {}", e)))?;
    }
    Ok(phi)
}

// ---------------------------------------------------------------------------
// command implementations
// ---------------------------------------------------------------------------

fn run(cli: Cli, out: &Output) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Curve { cmd: CurveCmd::Info { curve } } => cmd_curve_info(&curve, cli.seed, out),
        Cmd::Isogeny { cmd } => match cmd {
            IsogenyCmd::FromPoints { curve, points } => {
                cmd_from_points(&curve, &points, cli.seed, out)
            }
            IsogenyCmd::FromKernel { curve, psi, method } => {
                cmd_from_kernel(&curve, &psi, method, cli.seed, out)
            }
            IsogenyCmd::Recover { e1, e2, degree, method, dmax } => {
                cmd_recover(&e1, &e2, degree, method, dmax, cli.seed, out)
            }
            IsogenyCmd::Eval { isogeny, point } => cmd_eval(&isogeny, &point, cli.seed, out),
            IsogenyCmd::Dual { isogeny, dmax } => cmd_dual(&isogeny, dmax, cli.seed, out),
        },
        Cmd::Divpoly { curve, m } => cmd_divpoly(&curve, m, cli.seed, out),
        Cmd::WpSeries { curve, n, method } => cmd_wp_series(&curve, n, method, cli.seed, out),
        Cmd::Bench { op, ladder } => cmd_bench(op, &ladder, cli.seed, out),
    }
}

fn cmd_curve_info(curve: &str, seed: u64, out: &Output) -> Result<(), CliError> {
    let (_, e) = parse_curve(curve, seed)?;
    let order = enumerate_points(&e).ok().map(|pts| pts.len() as u64);
    if out.json {
        let mut v = json!({
            "curve": curve_to_json(&e),
            "invariants": {
                "b2": elem_to_json(&e.b2),
                "b4": elem_to_json(&e.b4),
                "b6": elem_to_json(&e.b6),
                "b8": elem_to_json(&e.b8),
                "c4": elem_to_json(&e.c4),
                "c6": elem_to_json(&e.c6),
                "discriminant": elem_to_json(&e.discriminant),
                "j": elem_to_json(&e.j_invariant),
            },
        });
        if let Some(n) = order {
            v["order"] = json!(n);
        }
        println!("{}", v);
    } else {
        println!("curve: {}", out.curve_line(&e));
        println!(
            "field: F_{}{}",
            e.spec().p(),
            if e.spec().degree() > 1 {
                format!("^{}", e.spec().degree())
            } else {
                String::new()
            }
        );
        println!(
            "b2 = {}, b4 = {}, b6 = {}, b8 = {}",
            out.elem(&e.b2),
            out.elem(&e.b4),
            out.elem(&e.b6),
            out.elem(&e.b8)
        );
        println!(
            "c4 = {}, c6 = {}, discriminant = {}, j = {}",
            out.elem(&e.c4),
            out.elem(&e.c6),
            out.elem(&e.discriminant),
            out.elem(&e.j_invariant)
        );
        match order {
            Some(n) => println!("order: {}", n),
            None => println!("order: not enumerable at this field size"),
        }
    }
    Ok(())
}

fn print_isogeny(phi: &Isogeny, out: &Output) {
    if out.json {
        println!("{}", isogeny_to_json(phi));
        return;
    }
    println!("degree: {}", phi.degree);
    println!("codomain: {}", out.curve_line(&phi.codomain));
    println!("kernel polynomial: {}", out.poly(&phi.kernel_poly));
    println!("x-map: ({}) / ({})", out.poly(&phi.maps.p), out.poly(&phi.maps.q));
    println!(
        "y-map: (({}) + ({})*y) / ({})",
        out.poly(&phi.maps.n0),
        out.poly(&phi.maps.n1),
        out.poly(&phi.maps.d)
    );
    if !phi.c.is_one() {
        println!("pullback constant: {}", out.elem(&phi.c));
    }
}

fn cmd_from_points(curve: &str, points: &str, seed: u64, out: &Output) -> Result<(), CliError> {
    let (spec, e) = parse_curve(curve, seed)?;
    let v = read_json_arg(points)?;
    let items = v
        .as_array()
        .ok_or_else(|| CliError::Parse("expected a JSON list of points".into()))?;
    let mut kernel = Vec::with_capacity(items.len());
    for item in items {
        kernel.push(point_from_json(item, &spec)?);
    }
    let phi = velu(&e, &kernel).map_err(CliError::math)?;
    print_isogeny(&phi, out);
    Ok(())
}

/// Kernel order implied by a kernel polynomial: 2-torsion roots contribute
/// one point each, all other roots two.
fn kernel_degree(e: &WeierstrassCurve, psi: &Polynomial) -> u64 {
    let (_, two_uni) = two_torsion_polys(e);
    let d2 = psi
        .to_monic()
        .gcd_monic(&two_uni.to_monic())
        .degree()
        .unwrap_or(0) as u64;
    let d = psi.degree().unwrap_or(0) as u64;
    1 + d2 + 2 * (d - d2)
}

fn cmd_from_kernel(
    curve: &str,
    psi: &str,
    method: MethodKernel,
    seed: u64,
    out: &Output,
) -> Result<(), CliError> {
    let (spec, e) = parse_curve(curve, seed)?;
    let psi = poly_from_json(&read_json_arg(psi)?, &spec)?;
    let phi = match method {
        MethodKernel::Kohel => kohel(&e, &psi).map_err(CliError::math)?,
        MethodKernel::General => {
            let ell = kernel_degree(&e, &psi);
            from_kernel_general(&e, &psi, ell).map_err(CliError::math)?
        }
    };
    print_isogeny(&phi, out);
    Ok(())
}

fn cmd_recover(
    e1: &str,
    e2: &str,
    degree: u64,
    method: MethodRecover,
    dmax: usize,
    seed: u64,
    out: &Output,
) -> Result<(), CliError> {
    let (spec, e1) = parse_curve(e1, seed)?;
    let (_, e2) = parse_curve(e2, seed)?;
    if e2.spec() != &spec {
        return Err(CliError::Parse("curves live in different fields".into()));
    }
    let kernels: Vec<Polynomial> = match method {
        MethodRecover::Stark => {
            // stark works on short models; conjugate the kernel back
            let (s1, rho1, _) = short_form(&e1).map_err(CliError::math)?;
            let (s2, _, _) = short_form(&e2).map_err(CliError::math)?;
            let d = stark(&s1, &s2, degree).map_err(CliError::math)?;
            let psi_short = denominator_to_kernel_poly(&s1, &d).map_err(CliError::math)?;
            let one = FieldElement::one(&spec);
            vec![psi_short.substitute_affine(&one, &rho1.r.neg())]
        }
        MethodRecover::Naive => {
            let found = naive_search(&e1, &e2, degree, dmax).map_err(CliError::math)?;
            if found.is_empty() {
                return Err(CliError::Math("no isogeny of the requested degree".into()));
            }
            let mut polys = Vec::new();
            for pts in &found {
                let work = pts
                    .iter()
                    .find_map(|p| p.xy().map(|(x, _)| x.spec().clone()))
                    .unwrap_or_else(|| spec.clone());
                let ec = if work == spec {
                    e1.clone()
                } else {
                    e1.base_change(&work).map_err(CliError::math)?
                };
                let phi = velu(&ec, pts).map_err(CliError::math)?;
                let psi = phi.kernel_poly.to_monic();
                // rational kernels descend to the base field
                let psi = psi
                    .coeffs()
                    .iter()
                    .map(|c| c.descend(&spec))
                    .collect::<Option<Vec<_>>>()
                    .map(|cs| Polynomial::new(&spec, cs))
                    .unwrap_or(psi);
                polys.push(psi);
            }
            polys
        }
    };
    if out.json {
        println!(
            "{}",
            json!({ "kernels": kernels.iter().map(poly_to_json).collect::<Vec<_>>() })
        );
    } else {
        for k in &kernels {
            println!("kernel polynomial: {}", out.poly(k));
        }
    }
    Ok(())
}

fn cmd_eval(isogeny: &str, point: &str, seed: u64, out: &Output) -> Result<(), CliError> {
    let phi = parse_isogeny(isogeny, seed)?;
    let p = point_from_json(&read_json_arg(point)?, phi.spec())?;
    let image = evaluate(&phi, &p).map_err(CliError::math)?;
    if out.json {
        println!("{}", json!({ "image": point_to_json(&image) }));
    } else {
        match image.xy() {
            None => println!("inf"),
            Some((x, y)) => println!("[{}, {}]", out.elem(x), out.elem(y)),
        }
    }
    Ok(())
}

fn cmd_dual(isogeny: &str, dmax: usize, seed: u64, out: &Output) -> Result<(), CliError> {
    let phi = parse_isogeny(isogeny, seed)?;
    let phihat = dual(&phi, dmax).map_err(CliError::math)?;
    // verify dual . phi = [l] on every enumerable domain point
    let mut verified = 0u64;
    if let Ok(pts) = enumerate_points(&phi.domain) {
        for p in &pts {
            let lhs = evaluate(&phihat, &evaluate(&phi, p).map_err(CliError::math)?)
                .map_err(CliError::math)?;
            let rhs = scalar_mul(&phi.domain, phi.degree as i64, p).map_err(CliError::math)?;
            if lhs != rhs {
                return Err(CliError::Math(format!(
                    "dual verification failed at {}",
                    p
                )));
            }
            verified += 1;
        }
    }
    if out.json {
        println!(
            "{}",
            json!({ "dual": isogeny_to_json(&phihat), "verified_points": verified })
        );
    } else {
        print_isogeny(&phihat, out);
        println!(
            "verified: dual of phi composes to [{}] on {} points",
            phi.degree, verified
        );
    }
    Ok(())
}

fn curve_poly_json(cp: &CurvePolynomial) -> Value {
    json!({ "u": poly_to_json(&cp.u), "v": poly_to_json(&cp.v) })
}

fn cmd_divpoly(curve: &str, m: u64, seed: u64, out: &Output) -> Result<(), CliError> {
    let (_, e) = parse_curve(curve, seed)?;
    let (psi, phi, omega) = division_polynomial(&e, m).map_err(CliError::math)?;
    if out.json {
        println!(
            "{}",
            json!({
                "m": m,
                "psi": curve_poly_json(&psi),
                "phi": poly_to_json(&phi),
                "omega": curve_poly_json(&omega),
            })
        );
    } else {
        println!("psi_{} = {}", m, psi);
        println!("phi_{} = {}", m, phi);
        println!("omega_{} = {}", m, omega);
    }
    Ok(())
}

fn cmd_wp_series(
    curve: &str,
    n: usize,
    method: MethodWp,
    seed: u64,
    out: &Output,
) -> Result<(), CliError> {
    let (_, e) = parse_curve(curve, seed)?;
    let (short, _, _) = short_form(&e).map_err(CliError::math)?;
    let wp_method = match method {
        MethodWp::Recurrence => WpMethod::Recurrence,
        MethodWp::Fast => WpMethod::Fast,
    };
    let wp = wp_series(&short.a4, &short.a6, n, wp_method).map_err(CliError::math)?;
    if out.json {
        let coeffs: Vec<Value> = (wp.lo()..wp.valid_to())
            .map(|k| elem_to_json(&wp.coeff_at(k)))
            .collect();
        println!(
            "{}",
            json!({ "lo": wp.lo(), "valid_to": wp.valid_to(), "coeffs": coeffs })
        );
    } else {
        println!("wp = {}", wp);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// benchmark ladder
// ---------------------------------------------------------------------------

fn parse_ladder(s: &str) -> Result<Vec<usize>, CliError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| CliError::Parse("ladder must look like 64:1024".into()))?;
    let start: usize = a.trim().parse().map_err(CliError::parse)?;
    let end: usize = b.trim().parse().map_err(CliError::parse)?;
    if start == 0 || end < start {
        return Err(CliError::Parse("ladder bounds must satisfy 0 < start <= end".into()));
    }
    let mut out = Vec::new();
    let mut n = start;
    while n <= end {
        out.push(n);
        n *= 2;
    }
    Ok(out)
}

fn random_poly(spec: &Field, n: usize, rng: &mut ChaCha8Rng) -> Polynomial {
    let mut coeffs: Vec<FieldElement> =
        (0..n).map(|_| FieldElement::random(spec, rng)).collect();
    // keep the degree exact
    if let Some(last) = coeffs.last_mut() {
        if last.is_zero() {
            *last = FieldElement::one(spec);
        }
    }
    Polynomial::new(spec, coeffs)
}

fn fitted_exponent(rows: &[(usize, u64)]) -> f64 {
    // least-squares slope of ln(count) against ln(n)
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|(n, c)| ((*n as f64).ln(), (*c as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn cmd_bench(op: BenchOp, ladder: &str, seed: u64, out: &Output) -> Result<(), CliError> {
    let sizes = parse_ladder(ladder)?;
    let spec = make_field_seeded(65537, 1, None, seed).map_err(CliError::parse)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<(usize, u64)> = Vec::new();
    let mut recip_ratios: Vec<(usize, f64)> = Vec::new();
    for &n in &sizes {
        let count = match op {
            BenchOp::Mul => {
                let a = random_poly(&spec, n, &mut rng);
                let b = random_poly(&spec, n, &mut rng);
                reset_op_count();
                let _ = a.multiply(&b);
                op_count()
            }
            BenchOp::Recip => {
                let mut coeffs: Vec<FieldElement> =
                    (0..n).map(|_| FieldElement::random(&spec, &mut rng)).collect();
                coeffs[0] = FieldElement::one(&spec); // unit constant term
                let f = TruncatedSeries::new(&spec, coeffs, n);
                reset_op_count();
                let _ = reciprocal(&f, n).map_err(CliError::math)?;
                let count = op_count();
                // cost of one full-size multiplication for the 4*M(n) bound
                let a = random_poly(&spec, n, &mut rng);
                let b = random_poly(&spec, n, &mut rng);
                reset_op_count();
                let _ = a.multiply(&b);
                let m_n = op_count().max(1);
                recip_ratios.push((n, count as f64 / m_n as f64));
                count
            }
            BenchOp::Exp => {
                let mut coeffs: Vec<FieldElement> =
                    (0..n).map(|_| FieldElement::random(&spec, &mut rng)).collect();
                coeffs[0] = FieldElement::zero(&spec); // exp needs f(0) = 0
                let f = TruncatedSeries::new(&spec, coeffs, n);
                reset_op_count();
                let _ = exp_trunc(&f, n).map_err(CliError::math)?;
                op_count()
            }
        };
        rows.push((n, count));
    }
    let exponent = fitted_exponent(&rows);
    let superlinear = rows
        .windows(2)
        .all(|w| w[1].1 as f64 / w[1].0 as f64 >= w[0].1 as f64 / w[0].0 as f64);
    let subquadratic = exponent < 2.0;
    let max_ratio = recip_ratios.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    if out.json {
        let mut v = json!({
            "op": match op { BenchOp::Mul => "mul", BenchOp::Recip => "recip", BenchOp::Exp => "exp" },
            "rows": rows.iter().map(|(n, c)| json!({"n": n, "ops": c})).collect::<Vec<_>>(),
            "exponent": exponent,
            "superlinear": superlinear,
            "subquadratic": subquadratic,
        });
        if !recip_ratios.is_empty() {
            v["max_cost_over_mul"] = json!(max_ratio);
            v["within_4m"] = json!(max_ratio <= 4.0);
        }
        println!("{}", v);
    } else {
        println!("{:>8} {:>14} {:>12}", "n", "base muls", "ops/n");
        for (n, c) in &rows {
            println!("{:>8} {:>14} {:>12.2}", n, c, *c as f64 / *n as f64);
        }
        println!("fitted exponent: {:.3}", exponent);
        println!(
            "superlinear: {} | subquadratic: {}",
            if superlinear { "yes" } else { "no" },
            if subquadratic { "yes" } else { "no" }
        );
        if !recip_ratios.is_empty() {
            println!(
                "newton reciprocal cost / M(n): max {:.2} (bound 4)",
                max_ratio
            );
        }
    }
    Ok(())
}
