//! Command implementations behind the `pgeneo` binary. Each command returns
//! an [`Outcome`] holding the exit code and the text to print, so the
//! commands can be driven from tests without spawning a process.

use std::fmt::Write as _;
use std::path::Path;

use pgeneo_core::builders::{digit_six_instance, squares_instance, SquaresConfig};
use pgeneo_core::covering::{cover_domain, cover_operations, cover_operator_family, EpsilonNet};
use pgeneo_core::instance::Instance;
use pgeneo_core::operations::validate_perception_triple;
use pgeneo_core::pgeneo::{check_restriction, combine, convex_combine, Aggregator, AuditConfig, Constructed, RestrictionReport, Side};
use pgeneo_core::{certify, Certificate, Error};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

impl Outcome {
    fn new(passed: bool, text: String) -> Self {
        Outcome {
            code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
            text,
        }
    }

    pub fn input_error(err: &Error) -> Self {
        Outcome {
            code: EXIT_INPUT_ERROR,
            text: format!("error: {err}\n"),
        }
    }
}

/// Optional tolerance overrides from the command line.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub delta_mem: Option<f64>,
    pub delta_num: Option<f64>,
}

pub fn load(path: &Path, overrides: Overrides) -> Result<Instance, Error> {
    let inst = Instance::load(path)?;
    if overrides == Overrides::default() {
        return Ok(inst);
    }
    let mut tol = inst.tolerances();
    if let Some(m) = overrides.delta_mem {
        tol.delta_mem = m;
    }
    if let Some(n) = overrides.delta_num {
        tol.delta_num = n;
    }
    inst.with_tolerances(tol)
}

fn append_json(text: &mut String, value: serde_json::Value) {
    text.push_str(&serde_json::to_string_pretty(&value).expect("report serializes"));
    text.push('\n');
}

pub fn cmd_validate(inst: &Instance, triple: &str, as_json: bool) -> Result<Outcome, Error> {
    let t = inst.triple(triple)?;
    let names = &inst.file().triples[triple].ops;
    let tol = inst.tolerances();
    let report = validate_perception_triple(t, tol.delta_mem);
    let mut text = String::new();
    if report.checked_ops == 0 {
        writeln!(text, "triple `{triple}`: valid (vacuous: the operation list is empty)").unwrap();
    } else if report.admissible {
        writeln!(text, "triple `{triple}`: valid, {} operation(s) admissible", report.checked_ops).unwrap();
    } else {
        writeln!(text, "triple `{triple}`: INVALID, {} failure(s)", report.failures.len()).unwrap();
        for f in &report.failures {
            let op = f.op.map_or("?", |i| names[i].as_str());
            match f.nearest {
                Some(j) => writeln!(
                    text,
                    "  op `{op}`: member {} of {} composed with it is not in {} (nearest member {j} at distance {})",
                    f.member,
                    t.phi().label(),
                    t.phi_prime().label(),
                    f.gap
                ),
                None => writeln!(
                    text,
                    "  op `{op}`: member {} of {} has nowhere to go, {} is empty",
                    f.member,
                    t.phi().label(),
                    t.phi_prime().label()
                ),
            }
            .unwrap();
        }
    }
    if as_json {
        append_json(
            &mut text,
            json!({"command": "validate", "triple": triple, "vacuous": report.checked_ops == 0, "report": report}),
        );
    }
    Ok(Outcome::new(report.admissible, text))
}

fn render_certificate(name: &str, cert: &Certificate, op_names: &[String]) -> String {
    let mut text = String::new();
    let verdict = if cert.certified { "certified" } else { "NOT certified" };
    writeln!(text, "operator `{name}`: {verdict}").unwrap();
    write!(text, "  equivariance residual  {}", cert.equivariance_residual).unwrap();
    if let Some((m, s)) = cert.equivariance_witness {
        write!(text, " (member {m}, op `{}`)", op_names[s]).unwrap();
    }
    text.push('\n');
    writeln!(text, "  Lipschitz excess F     {}", cert.lipschitz_excess_f).unwrap();
    writeln!(text, "  Lipschitz excess F'    {}", cert.lipschitz_excess_f_prime).unwrap();
    if cert.codomain_ok {
        writeln!(text, "  codomain               ok").unwrap();
    } else {
        writeln!(text, "  codomain               {} image(s) outside the target spaces", cert.codomain_failures.len()).unwrap();
        for f in &cert.codomain_failures {
            let side = match f.side {
                Side::F => "F",
                Side::FPrime => "F'",
            };
            writeln!(text, "    {side} of member {}: distance {} to nearest", f.member, f.gap).unwrap();
        }
    }
    let tr = &cert.transformation;
    writeln!(
        text,
        "  T homomorphism         {} ({} composable pairs, {} invertible maps)",
        if cert.homomorphism_ok { "ok" } else { "violated" },
        tr.composable_pairs,
        tr.invertible_maps
    )
    .unwrap();
    for (i, j) in &tr.homomorphism_violations {
        writeln!(text, "    T({0}{1}) != T({0})T({1})", op_names[*i], op_names[*j]).unwrap();
    }
    for i in &tr.inverse_violations {
        writeln!(text, "    T({0}^-1) != T({0})^-1", op_names[*i]).unwrap();
    }
    if !cert.untranslatable.is_empty() {
        writeln!(text, "  source triple invalid: {} (member, op) pairs leave Phi'", cert.untranslatable.len()).unwrap();
    }
    text
}

pub fn cmd_certify(inst: &Instance, operator: &str, as_json: bool) -> Result<Outcome, Error> {
    let pair = inst.operator(operator)?;
    let tol = inst.tolerances();
    let cert = certify(pair, &tol);
    let source = &inst.file().operators[operator].source;
    let op_names = &inst.file().triples[source].ops;
    let mut text = render_certificate(operator, &cert, op_names);
    let restriction = check_restriction(pair, &tol);
    match &restriction {
        RestrictionReport::NotApplicable { reason } => {
            writeln!(text, "  restriction F'|Phi = F  not applicable ({reason})").unwrap()
        }
        RestrictionReport::Applicable { max_gap, witness } => {
            writeln!(text, "  restriction F'|Phi = F  max gap {max_gap} (member {witness})").unwrap()
        }
    }
    if as_json {
        append_json(
            &mut text,
            json!({"command": "certify", "operator": operator, "certificate": cert, "restriction": restriction}),
        );
    }
    Ok(Outcome::new(cert.certified, text))
}

/// Parses `max`, `min`, `convex:w1,w2,…` or `power-mean:p:w1,w2,…`.
/// `arity` is used by `max` and `min`.
pub fn parse_aggregator(spec: &str, arity: usize) -> Result<Aggregator, Error> {
    let bad = || Error::InvalidAggregator(format!("cannot parse aggregator `{spec}`"));
    let weights = |s: &str| -> Result<Vec<f64>, Error> {
        s.split(',').map(|w| w.trim().parse::<f64>().map_err(|_| bad())).collect()
    };
    let mut parts = spec.splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some("max"), None, None) => Aggregator::max(arity),
        (Some("min"), None, None) => Aggregator::min(arity),
        (Some("convex"), Some(w), None) => Aggregator::convex(weights(w)?),
        (Some("power-mean"), Some(p), Some(w)) => {
            Aggregator::power_mean(p.trim().parse().map_err(|_| bad())?, weights(w)?)
        }
        _ => Err(bad()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombineRequest<'a> {
    pub aggregator: &'a str,
    pub operators: &'a [String],
    pub output: &'a str,
    pub audit: AuditConfig,
}

/// Builds the new operator and, only if it certifies, writes it (with its
/// certificate) back into the instance file at `path`.
///
/// `convex:` specs go through the convex-combination construction, which
/// requires every weighted image to be a member of the target spaces; the
/// other aggregators go through `L*`.
pub fn cmd_combine(path: &Path, overrides: Overrides, req: &CombineRequest<'_>, as_json: bool) -> Outcome {
    let mut inst = match load(path, overrides) {
        Ok(i) => i,
        Err(e) => return Outcome::input_error(&e),
    };
    let tol = inst.tolerances();
    let result = (|| -> Result<Constructed, Error> {
        if inst.operators().contains_key(req.output) {
            return Err(Error::Precondition(format!("operator `{}` already exists", req.output)));
        }
        let parts = req
            .operators
            .iter()
            .map(|n| inst.operator(n).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        let l = parse_aggregator(req.aggregator, parts.len())?;
        match l.kind() {
            pgeneo_core::pgeneo::AggregatorKind::ConvexCombination { weights } => convex_combine(&parts, weights, &tol),
            _ => combine(&l, &parts, &tol, req.audit),
        }
    })();
    let built = match result {
        Ok(b) => b,
        Err(e @ (Error::AuditFailed { .. } | Error::ConvexityFailure(_))) => {
            return Outcome {
                code: EXIT_CHECK_FAILED,
                text: format!("error: {e}\nnothing written\n"),
            }
        }
        Err(e) => {
            let mut out = Outcome::input_error(&e);
            out.text.push_str("nothing written\n");
            return out;
        }
    };
    let source = &inst.file().operators[&req.operators[0]].source;
    let op_names = inst.file().triples[source].ops.clone();
    let mut text = render_certificate(req.output, &built.certificate, &op_names);
    if !built.certificate.certified {
        text.push_str("nothing written\n");
        if as_json {
            append_json(&mut text, json!({"command": "combine", "written": false, "certificate": built.certificate}));
        }
        return Outcome::new(false, text);
    }
    let saved = inst
        .add_operator(req.output, &built.pair, Some(&built.certificate))
        .and_then(|_| inst.save(path));
    if let Err(e) = saved {
        return Outcome::input_error(&e);
    }
    writeln!(text, "wrote operator `{}` to {}", req.output, path.display()).unwrap();
    if as_json {
        append_json(
            &mut text,
            json!({"command": "combine", "written": true, "operator": req.output, "certificate": built.certificate}),
        );
    }
    Outcome::new(true, text)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoverTarget {
    /// Points of the domain under `D_X` for the named space.
    Domain { space: String },
    /// The operation list of the named triple under `D_Aut` for its `Φ`.
    Ops { triple: String },
    /// Named operators (all operators when empty) under `D_P-GENEO`.
    Operators { names: Vec<String> },
}

fn render_net(text: &mut String, net: &EpsilonNet, labels: &[String]) {
    writeln!(text, "  epsilon           {}", net.epsilon).unwrap();
    writeln!(text, "  centers           {}", net.len()).unwrap();
    writeln!(text, "  radius achieved   {}", net.covering_radius_achieved).unwrap();
    for (c, count) in net.center_indices.iter().zip(net.histogram()) {
        writeln!(text, "    {:<20} covers {count}", labels[*c]).unwrap();
    }
}

pub fn cmd_cover(inst: &Instance, target: &CoverTarget, epsilon: f64, as_json: bool) -> Result<Outcome, Error> {
    let tol = inst.tolerances();
    let mut text = String::new();
    let (net, extra, labels) = match target {
        CoverTarget::Domain { space } => {
            let omega = inst.space(space)?;
            let cover = cover_domain(omega, epsilon, &tol)?;
            writeln!(text, "cover of the domain under the pseudo-metric of `{space}`").unwrap();
            let stability = json!(cover.stability);
            (cover.net, Some(stability), inst.domain().points().to_vec())
        }
        CoverTarget::Ops { triple } => {
            let t = inst.triple(triple)?;
            let net = cover_operations(t.ops(), t.phi(), epsilon)?;
            writeln!(text, "cover of the operations of `{triple}`").unwrap();
            (net, None, inst.file().triples[triple].ops.clone())
        }
        CoverTarget::Operators { names } => {
            let names: Vec<String> = if names.is_empty() {
                inst.operators().keys().cloned().collect()
            } else {
                names.clone()
            };
            let family = names
                .iter()
                .map(|n| inst.operator(n).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            let net = cover_operator_family(&family, epsilon, &tol)?;
            writeln!(text, "cover of {} operator(s)", family.len()).unwrap();
            (net, None, names)
        }
    };
    render_net(&mut text, &net, &labels);
    let mut passed = net.covering_radius_achieved <= epsilon;
    if let Some(s) = &extra {
        let holds = s["holds"].as_bool().unwrap_or(false);
        writeln!(
            text,
            "  stability         net of {} members moves D_X by at most {} ({})",
            s["net_size"], s["max_change"], if holds { "within 2 epsilon" } else { "EXCEEDS 2 epsilon" }
        )
        .unwrap();
        passed &= holds;
    }
    if as_json {
        let centers: Vec<&String> = net.center_indices.iter().map(|&c| &labels[c]).collect();
        append_json(
            &mut text,
            json!({"command": "cover", "net": net, "centers": centers, "histogram": net.histogram(), "stability": extra}),
        );
    }
    Ok(Outcome::new(passed, text))
}

pub fn cmd_demo_squares(cfg: &SquaresConfig, out: &Path) -> Result<Outcome, Error> {
    let file = squares_instance(cfg)?;
    let inst = Instance::from_file(file)?;
    inst.save(out)?;
    let text = format!(
        "wrote the nested-squares instance ({0}x{0} grid, side {1}, margin {2}, translation {3:?}) to {4}\n\
         triples: source, target{5}; operators: cut{6}\n",
        cfg.grid,
        cfg.side,
        cfg.margin,
        cfg.shift,
        out.display(),
        if cfg.naive_variant { ", target_naive" } else { "" },
        if cfg.naive_variant { ", cut_naive" } else { "" },
    );
    Ok(Outcome::new(true, text))
}

pub fn cmd_demo_six(out: &Path) -> Result<Outcome, Error> {
    let inst = Instance::from_file(digit_six_instance()?)?;
    inst.save(out)?;
    Ok(Outcome::new(
        true,
        format!("wrote the rotated-six instance to {}\ntriples: small_turns, all_turns\n", out.display()),
    ))
}
