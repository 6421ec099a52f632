use std::collections::BTreeMap;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::{CertSummary, Outcome};
use mflab::dilation::{
    commuting_pair, random_input, DilationInput, DilationInputJson, RandomSpec, COMMUTE_TOL, CONTRACTION_CLAMP,
    CONTRACTION_REJECT, INPUT_TOL,
};
use mflab::groups::{coset_decompose, fuzz_freeness, CosetSystem, FuzzSpec};
use mflab::matcore::{ginibre, haar_unitary_with, unitarity_defect, TupleJson};
use mflab::mfcheck::{
    abelianize, ball_lower_bound_capped, certify_commuting_conditions, certify_crossed_conditions, circle_sup, laurent,
    microstate_report, torus_sup, BoundKind, Certificate, NormOracle, CIRCLE_GRID, TORUS_GRID, TORUS_MAX_ARITY,
};
use mflab::ncpoly::{parse, NCPoly};
use mflab::par::{self, task_rng};
use mflab::pvcrossed::{
    build_crossed_model, finite_group_crossed, gauge_action, orbit_model, pv_frame, standard_representation,
    CrossedProbes, EpsilonReport, FiniteGroup, HOMOMORPHISM_TOL,
};
use mflab::{CMatrix, MatTuple};

fn cert(name: &str, passed: bool) -> CertSummary {
    CertSummary { name: name.into(), passed }
}

fn tolerances<const N: usize>(items: [(&str, f64); N]) -> BTreeMap<String, f64> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn polys(texts: &[String], num_vars: usize, what: &str) -> Result<Vec<NCPoly>> {
    texts
        .iter()
        .map(|t| parse(t, num_vars as u32).with_context(|| format!("{what} polynomial {t:?}")))
        .collect()
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

// dilate

fn parse_random_spec(text: &str) -> Result<RandomSpec> {
    let mut kv = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {part:?}"))?;
        kv.insert(k.trim(), v.trim());
    }
    let int = |k: &str| -> Result<Option<u64>> {
        kv.get(k).map(|v| v.parse::<u64>().with_context(|| format!("{k}={v}"))).transpose()
    };
    let need = |k: &str| -> Result<u64> { int(k)?.ok_or_else(|| anyhow!("--random needs {k}=")) };
    for k in kv.keys() {
        ensure!(["dim", "n", "m", "seed", "rank", "eps"].contains(k), "unknown key {k:?} in --random");
    }
    let mut spec = RandomSpec::new(need("dim")? as usize, need("n")? as usize, need("m")? as usize, need("seed")?);
    if let Some(r) = int("rank")? {
        spec.rank = r as usize;
    }
    if let Some(e) = kv.get("eps") {
        spec.eps = e.parse().with_context(|| format!("eps={e}"))?;
    }
    Ok(spec)
}

#[derive(Serialize)]
struct DilationRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    input_dim: usize,
    dilated_dim: usize,
    t_measured: f64,
    delta: f64,
    d_delta: f64,
    bound: f64,
    commutators: Vec<Vec<f64>>,
    max_commutator: f64,
    unitarity_defect: f64,
    certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    us: Option<TupleJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vs: Option<TupleJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
}

pub(crate) fn dilate(a: &DilateArgs) -> Result<Outcome> {
    ensure!(a.delta > 0.0 && a.delta < 1.0, "--delta must lie in (0, 1)");
    let inputs: Vec<(Option<u64>, DilationInput)> = match (&a.input, &a.random) {
        (Some(path), _) => {
            let j: DilationInputJson = serde_json::from_str(&read(path)?).with_context(|| format!("parsing {path}"))?;
            vec![(None, DilationInput::try_from(j)?)]
        }
        (None, Some(text)) => {
            let spec = parse_random_spec(text)?;
            ensure!(a.trials >= 1, "--trials must be at least 1");
            par::map_range(a.trials, |k| {
                let s = RandomSpec { seed: spec.seed.wrapping_add(k as u64), ..spec };
                random_input(&s).map(|i| (Some(s.seed), i))
            })
            .into_iter()
            .collect::<Result<_, _>>()?
        }
        (None, None) => bail!("one of --input or --random is required"),
    };
    let m = inputs[0].1.vs().len();
    let qs = polys(&a.q_polys, m, "Q")?;
    ensure!(a.q_polys.is_empty() || a.r1.is_some(), "--q-poly needs --r1");
    let mut rows = Vec::with_capacity(inputs.len());
    for (seed, input) in &inputs {
        let r = commuting_pair(input, a.delta)?;
        let certificate = match a.r1 {
            Some(r1) => Some(certify_commuting_conditions(
                &r.us,
                &r.vs,
                &qs,
                &NormOracle::ExactMatrix { target: input.vs().clone() },
                r1,
            )?),
            None => None,
        };
        rows.push(DilationRow {
            seed: *seed,
            input_dim: input.us().dim(),
            dilated_dim: r.us.dim(),
            t_measured: r.t_measured,
            delta: r.delta,
            d_delta: r.d_delta,
            bound: r.bound,
            max_commutator: r.max_commutator(),
            certified: r.certified(),
            commutators: r.commutators.clone(),
            unitarity_defect: r.unitarity_defect,
            us: a.matrices.then(|| (&r.us).into()),
            vs: a.matrices.then(|| (&r.vs).into()),
            certificate,
        });
    }
    let mut certificates = vec![cert("commutator-bound", rows.iter().all(|r| r.certified))];
    if a.r1.is_some() {
        certificates.push(cert("r1-conditions", rows.iter().all(|r| r.certificate.as_ref().is_some_and(|c| c.passed))));
    }
    Ok(Outcome {
        payload: json!({ "trials": rows }),
        tolerances: tolerances([
            ("commute", COMMUTE_TOL),
            ("contraction_clamp", CONTRACTION_CLAMP),
            ("contraction_reject", CONTRACTION_REJECT),
            ("delta", a.delta),
            ("input", INPUT_TOL),
        ]),
        certificates,
    })
}

// pv

#[derive(Serialize)]
struct PvRow {
    n_j: usize,
    half_width: usize,
    commutator_norm: f64,
    commutator_bracket: f64,
    pi_over_n_j: f64,
    within_pi_over_n_j: bool,
}

pub(crate) fn pv(a: &PvArgs) -> Result<Outcome> {
    ensure!(!a.nj.is_empty(), "--nj is empty");
    ensure!(a.width_factor >= 1, "--width-factor must be at least 1");
    let frames = par::map_slice(&a.nj, |&n| pv_frame(n, a.width_factor * n));
    let mut rows = Vec::with_capacity(frames.len());
    for f in frames {
        let f = f?;
        let bound = std::f64::consts::PI / f.n_j as f64;
        rows.push(PvRow {
            n_j: f.n_j,
            half_width: f.ambient.half_width,
            commutator_norm: f.commutator_norm,
            commutator_bracket: f.commutator_bracket,
            pi_over_n_j: bound,
            within_pi_over_n_j: f.commutator_norm <= bound,
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].commutator_norm < w[0].commutator_norm);
    let within = rows.iter().all(|r| r.within_pi_over_n_j);
    Ok(Outcome {
        payload: json!({ "rows": rows, "strictly_decreasing": decreasing }),
        tolerances: BTreeMap::new(),
        certificates: vec![cert("decay", decreasing && within)],
    })
}

// crossed

#[derive(Serialize)]
struct CrossedRow {
    n_j: usize,
    model_dim: usize,
    p_rank: usize,
    near_periodicity: f64,
    epsilon_report: EpsilonReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
}

const UNITARY_TOL: f64 = 1e-10;

pub(crate) fn crossed(a: &CrossedArgs) -> Result<Outcome> {
    ensure!(a.dim >= 1 && a.m >= 1, "--dim and --m must be positive");
    ensure!(a.nj.iter().all(|&n| n >= 1), "--nj entries must be positive");
    let p_rank = a.p_rank.unwrap_or(a.dim);
    let mats = (0..a.m)
        .map(|i| haar_unitary_with(a.dim, &mut task_rng(a.seed, i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let base = MatTuple::new(a.dim, mats)?;
    let action = gauge_action(a.theta, &base)?;
    let range = *a.nj.iter().max().expect("nonempty");
    let orbit = orbit_model(&base, &action, range)?;
    let probes = CrossedProbes {
        g: polys(&a.g_polys, 1, "G")?,
        h: polys(&a.h_polys, 2 * a.m, "H")?,
        h_refs: None,
        p: polys(&a.p_polys, a.m + 1, "P")?,
    };
    let built = par::map_slice(&a.nj, |&n| -> Result<CrossedRow> {
        let frame = mflab::pvcrossed::pv_frame_default(n)?;
        let model = build_crossed_model(&orbit, &frame, p_rank, &probes)?;
        let certificate = match a.r1 {
            Some(r1) => {
                let refs: Vec<f64> = model.epsilon_report.h_deviations.iter().map(|r| r.reference).collect();
                Some(certify_crossed_conditions(&model, &probes.g, &probes.h, &NormOracle::Circle, &refs, r1)?)
            }
            None => None,
        };
        Ok(CrossedRow {
            n_j: n,
            model_dim: model.u.nrows(),
            p_rank,
            near_periodicity: orbit.near_periodicity(n as i64),
            epsilon_report: model.epsilon_report,
            certificate,
        })
    });
    let rows = built.into_iter().collect::<Result<Vec<_>>>()?;
    let certificates = match a.r1 {
        Some(_) => rows
            .iter()
            .map(|r| cert(&format!("r1-conditions n_j={}", r.n_j), r.certificate.as_ref().is_some_and(|c| c.passed)))
            .collect(),
        None => Vec::new(),
    };
    Ok(Outcome {
        payload: json!({ "action": action.kind(), "rows": rows }),
        tolerances: tolerances([("unitarity", UNITARY_TOL)]),
        certificates,
    })
}

// finite-crossed

fn finite_group(name: &str) -> Result<(FiniteGroup, usize, Vec<CMatrix>)> {
    let bad = || anyhow!("unknown group {name:?}; expected Z<p> or S<n>");
    let (head, num) = name.split_at(1.min(name.len()));
    let k: usize = num.parse().map_err(|_| bad())?;
    match head {
        "Z" | "z" => {
            ensure!((1..=64).contains(&k), "Z_p needs 1 ≤ p ≤ 64");
            let ws = (0..k)
                .map(|j| {
                    let mut w = CMatrix::identity(2, 2);
                    w[(1, 1)] = mflab::pvcrossed::gauge_phase(1.0 / k as f64, j as i64);
                    w
                })
                .collect();
            Ok((FiniteGroup::Cyclic(k), 2, ws))
        }
        "S" | "s" => {
            ensure!((2..=4).contains(&k), "S_n needs 2 ≤ n ≤ 4");
            Ok((FiniteGroup::Symmetric(k), k - 1, standard_representation(k)))
        }
        _ => Err(bad()),
    }
}

pub(crate) fn finite_crossed(a: &FiniteCrossedArgs) -> Result<Outcome> {
    ensure!(a.samples >= 1, "--samples must be at least 1");
    let (group, d, ws) = finite_group(&a.group)?;
    let fc = finite_group_crossed(d, group, ws)?;
    let residuals = par::map_range(a.samples, |k| fc.covariance_residual(&ginibre(d, d, &mut task_rng(a.seed, k as u64))));
    let max = residuals.iter().copied().fold(0.0, f64::max);
    let lambda_defect = fc.lambdas.iter().map(unitarity_defect).fold(0.0, f64::max);
    Ok(Outcome {
        payload: json!({
            "group": group.name(),
            "order": group.order(),
            "base_dim": d,
            "samples": a.samples,
            "residuals": residuals,
            "max_residual": max,
            "lambda_unitarity_defect": lambda_defect,
        }),
        tolerances: tolerances([("covariance", a.tol), ("homomorphism", HOMOMORPHISM_TOL)]),
        certificates: vec![cert("covariance", max <= a.tol)],
    })
}

// freeness

pub(crate) fn freeness(a: &FreenessArgs) -> Result<Outcome> {
    let n_max = a.n_max.unwrap_or(a.n);
    let m_max = a.m_max.unwrap_or(a.m);
    ensure!(a.n >= 2 && n_max >= a.n, "need 2 ≤ n ≤ n-max");
    ensure!(a.m >= 1 && m_max >= a.m, "need 1 ≤ m ≤ m-max");
    ensure!(a.exp_max >= 1, "--exp-max must be positive");
    ensure!(a.power >= 1, "--power must be positive");
    let spec = FuzzSpec {
        n_min: a.n,
        n_max,
        m_min: a.m,
        m_max,
        exp_max: a.exp_max,
        power: a.power,
        trials: a.trials,
        seed: a.seed,
    };
    let report = fuzz_freeness(&spec)?;
    let asserted = a.power == 3;
    let clean = report.failures.is_empty();
    let mut payload = serde_json::to_value(&report)?;
    payload["asserted"] = Value::Bool(asserted);
    Ok(Outcome {
        payload,
        tolerances: BTreeMap::new(),
        certificates: if asserted { vec![cert("freeness", clean)] } else { Vec::new() },
    })
}

// coset

#[derive(Serialize)]
struct CosetRow {
    g: String,
    sigma: Vec<usize>,
    hs: Vec<String>,
    reconstructs: bool,
}

pub(crate) fn coset(a: &CosetArgs) -> Result<Outcome> {
    let sys = CosetSystem::builtin(&a.system)?;
    let grp = sys.group();
    let mut elems = a.elems.iter().map(|t| grp.parse_elem(t).with_context(|| format!("element {t:?}"))).collect::<Result<Vec<_>>>()?;
    if a.random > 0 {
        let seed = a.seed.ok_or_else(|| anyhow!("--random needs --seed"))?;
        elems.extend((0..a.random).map(|k| grp.random(a.size, &mut task_rng(seed, k as u64))));
    }
    ensure!(!elems.is_empty(), "nothing to decompose; pass --g or --random");
    let rows = par::map_slice(&elems, |g| -> Result<CosetRow> {
        let d = coset_decompose(&sys, g)?;
        Ok(CosetRow {
            g: g.to_string(),
            sigma: d.sigma.images().iter().map(|i| i + 1).collect(),
            hs: d.hs.iter().map(ToString::to_string).collect(),
            reconstructs: d.reconstructs(&sys, g)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r.reconstructs);
    Ok(Outcome {
        payload: json!({
            "group": grp.name(),
            "index": sys.index(),
            "reps": sys.reps().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "rows": rows,
        }),
        tolerances: BTreeMap::new(),
        certificates: vec![cert("reconstruction", ok)],
    })
}

// norm

#[derive(Serialize)]
struct NormRow {
    poly: String,
    value: f64,
    upper: f64,
}

pub(crate) fn norm(a: &NormArgs) -> Result<Outcome> {
    let (rows, grid, arity): (Vec<NormRow>, usize, usize) = match a.oracle.as_str() {
        "circle" => {
            let ps = polys(&a.polys, 1, "circle")?;
            let rows = par::map_slice(&ps, |p| -> Result<NormRow> {
                let s = circle_sup(&laurent(p)?);
                Ok(NormRow { poly: p.to_string(), value: s.value, upper: s.upper })
            });
            (rows.into_iter().collect::<Result<_>>()?, CIRCLE_GRID, 1)
        }
        "torus" => {
            let loose = polys(&a.polys, TORUS_MAX_ARITY, "torus")?;
            let used = loose.iter().map(|p| p.max_index() as usize).max().unwrap_or(1).max(1);
            let m = a.m.unwrap_or(used);
            ensure!((1..=TORUS_MAX_ARITY).contains(&m), "torus dimension must be 1..={TORUS_MAX_ARITY}");
            ensure!(used <= m, "polynomials use X{used} on a {m}-torus");
            let mut rows = Vec::with_capacity(loose.len());
            for p in &loose {
                let p = p.with_num_vars(m as u32)?;
                let s = torus_sup(&abelianize(&p, m)?);
                rows.push(NormRow { poly: p.to_string(), value: s.value, upper: s.upper });
            }
            (rows, TORUS_GRID, m)
        }
        other => bail!("unknown oracle {other:?}; expected circle or torus"),
    };
    Ok(Outcome {
        payload: json!({ "oracle": a.oracle, "arity": arity, "grid": grid, "rows": rows }),
        tolerances: BTreeMap::new(),
        certificates: Vec::new(),
    })
}

// ball

pub(crate) fn ball(a: &BallArgs) -> Result<Outcome> {
    let p = parse(&a.poly, a.n).with_context(|| format!("polynomial {:?}", a.poly))?;
    let from = a.from.unwrap_or(a.radius);
    ensure!(from <= a.radius, "--from exceeds --radius");
    let mut rows = Vec::new();
    for r in from..=a.radius {
        rows.push(ball_lower_bound_capped(&p, a.n, r, a.cap)?);
    }
    let monotone = rows.windows(2).all(|w| w[1].lower_bound >= w[0].lower_bound - 1e-12);
    Ok(Outcome {
        payload: json!({ "poly": p.to_string(), "bound": BoundKind::LowerBound, "rows": rows, "monotone": monotone }),
        tolerances: BTreeMap::new(),
        certificates: Vec::new(),
    })
}

// report

fn parse_oracle(spec: &str, arity: usize) -> Result<NormOracle> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match kind {
        "circle" => NormOracle::Circle,
        "torus" => NormOracle::Torus { m: if rest.is_empty() { arity } else { rest.parse()? } },
        "exact" => {
            let j: TupleJson = serde_json::from_str(&read(rest)?).with_context(|| format!("parsing {rest}"))?;
            NormOracle::ExactMatrix { target: MatTuple::try_from(j)? }
        }
        "ball" => {
            let (n, r) = rest.split_once(':').ok_or_else(|| anyhow!("expected ball:<n>:<radius>"))?;
            NormOracle::BallLowerBound { n: n.parse()?, radius: r.parse()? }
        }
        "constant" => NormOracle::Constant {
            values: rest.split(',').map(|v| v.trim().parse::<f64>()).collect::<Result<_, _>>()?,
        },
        other => bail!("unknown oracle {other:?}"),
    })
}

pub(crate) fn report(a: &ReportArgs) -> Result<Outcome> {
    let tuples: Vec<TupleJson> = serde_json::from_str(&read(&a.models)?).with_context(|| format!("parsing {}", a.models))?;
    let models = tuples.into_iter().map(MatTuple::try_from).collect::<Result<Vec<_>, _>>()?;
    ensure!(!models.is_empty(), "{} holds no models", a.models);
    let arity = models[0].len();
    let lines: Vec<String> = read(&a.polys)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
        .filter(|l| !l.is_empty())
        .collect();
    let ps = polys(&lines, arity, "report")?;
    let oracle = parse_oracle(&a.oracle, arity)?;
    let r = microstate_report(&models, &ps, &oracle)?;
    let mut tol = BTreeMap::new();
    let mut certificates = Vec::new();
    if let Some(max) = a.max_deviation {
        tol.insert("max_deviation".to_string(), max);
        let ok = r.rows.iter().all(|row| row.bound == BoundKind::Exact && row.deviation.is_some_and(|d| d <= max));
        certificates.push(cert("max-deviation", ok));
    }
    Ok(Outcome {
        payload: serde_json::to_value(&r)?,
        tolerances: tol,
        certificates,
    })
}
