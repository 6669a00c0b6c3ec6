use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};

use super::report::Report;
use super::schema::*;
use super::{decode, ScenarioError};
use crate::corpus;
use crate::error::Error;
use crate::evolution::{
    cesaro_averages, equivalence_check, mean_ergodic_limit_with, stability_check, trajectory,
    ErgodicOptions, Evolution, LimitMethod, Verdict,
};
use crate::jointness::{
    bell_inequality_check, coupling_feasibility, bell_counterexample, heisenberg_check,
    pairwise_expectation, CouplingProblem, Heisenberg, MarginalConstraint, Table,
};
use crate::markov::{
    chain_distributions, hidden_observable, indicator_chain, limit_distribution,
    process_evolution, process_marginal, enumerate_process_marginals, random_walk_evolution,
    DistributionSeries, Observable, ProcessModel, DISTRIBUTION_TOL,
};
use crate::quantum::{
    born_probabilities, conjugation_channel, gudder_step, measurement_expectation,
    schrodinger_evolution, walk_path_probability, GeneralizedDensity, GudderWalk,
    HermitianBasis, Measurement, QuantumState, WaveFunction,
};
use crate::sampling::{sample_averages, sample_values, sampling_verdict, SamplingFunction, Tristate};
use crate::spectral::{spectral_split, ComplexMatrix, ComplexVector, BAND_TOL};

type Res<T> = std::result::Result<T, ScenarioError>;

pub(crate) struct Defaults {
    pub tol: f64,
    pub horizon: usize,
    pub base_horizon: usize,
}

pub(crate) fn defaults(kind: Kind) -> Defaults {
    let (tol, horizon, base_horizon) = match kind {
        Kind::Evolution => (1e-8, 16, 64),
        // the convergence test must clear the O(1/H) Cesàro tail
        Kind::Sampling => (1e-2, 16, 256),
        Kind::MarkovChain => (1e-8, 20, 64),
        Kind::Process => (1e-10, 8, 64),
        Kind::QuantumWalk => (1e-10, 5, 64),
        Kind::Schrodinger => (1e-8, 16, 64),
        Kind::Jointness | Kind::BellExample => (1e-9, 0, 64),
    };
    Defaults {
        tol,
        horizon,
        base_horizon,
    }
}

pub(crate) struct Context {
    pub seed: Option<u64>,
    pub tol: f64,
    pub horizon: usize,
    pub base_horizon: usize,
}

impl Context {
    /// Seed for a randomised corpus; always echoed in the report.
    fn corpus_rng(&self, report: &mut Report) -> corpus::CorpusRng {
        let seed = self.seed.unwrap_or(0);
        report.seed = Some(seed);
        corpus::rng(seed)
    }
}

pub(crate) fn run(kind: Kind, payload: &Value, cx: &Context, r: &mut Report) -> Res<()> {
    match kind {
        Kind::Evolution => evolution(decode(payload, "payload")?, cx, r),
        Kind::Sampling => sampling(decode(payload, "payload")?, cx, r),
        Kind::MarkovChain => markov(decode(payload, "payload")?, cx, r),
        Kind::Process => process(decode(payload, "payload")?, cx, r),
        Kind::QuantumWalk => walk(decode(payload, "payload")?, cx, r),
        Kind::Schrodinger => schrodinger(decode(payload, "payload")?, cx, r),
        Kind::Jointness => jointness(decode(payload, "payload")?, cx, r),
        Kind::BellExample => {
            let _: EmptyPayload = decode(payload, "payload")?;
            bell_example(r)
        }
    }
}

fn at(path: impl Into<String>) -> impl FnOnce(Error) -> ScenarioError {
    let path = path.into();
    move |source| ScenarioError::Module { path, source }
}

fn required<'a, T>(v: &'a Option<T>, path: &str) -> Res<&'a T> {
    v.as_ref()
        .ok_or_else(|| ScenarioError::schema(path, "missing required field"))
}

fn to_complex(n: Num) -> Complex64 {
    match n {
        Num::Real(x) => Complex64::new(x, 0.0),
        Num::Complex([re, im]) => Complex64::new(re, im),
    }
}

fn cvector(v: &VectorSpec, path: &str) -> Res<ComplexVector> {
    if v.is_empty() {
        return Err(ScenarioError::schema(path, "vector must be nonempty"));
    }
    Ok(ComplexVector::from_iterator(v.len(), v.iter().map(|&x| to_complex(x))))
}

fn rvector(v: &VectorSpec, path: &str) -> Res<Vec<f64>> {
    v.iter()
        .enumerate()
        .map(|(i, x)| match *x {
            Num::Real(x) => Ok(x),
            Num::Complex([re, 0.0]) => Ok(re),
            Num::Complex(_) => Err(ScenarioError::schema(format!("{path}[{i}]"), "expected a real number")),
        })
        .collect()
}

fn shape<T>(rows: &[Vec<T>], path: &str) -> Res<(usize, usize)> {
    let cols = rows.first().map(Vec::len).unwrap_or(0);
    if rows.is_empty() || cols == 0 {
        return Err(ScenarioError::schema(path, "matrix must be nonempty"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(ScenarioError::schema(
            format!("{path}[{i}]"),
            format!("row has {} entries, expected {cols}", rows[i].len()),
        ));
    }
    Ok((rows.len(), cols))
}

fn cmatrix(m: &MatrixSpec, path: &str) -> Res<ComplexMatrix> {
    let (rows, cols) = shape(m, path)?;
    Ok(ComplexMatrix::from_row_iterator(
        rows,
        cols,
        m.iter().flatten().map(|&x| to_complex(x)),
    ))
}

fn rmatrix(m: &RealMatrixSpec, path: &str) -> Res<DMatrix<f64>> {
    let (rows, cols) = shape(m, path)?;
    Ok(DMatrix::from_row_iterator(rows, cols, m.iter().flatten().copied()))
}

fn cjson(v: &ComplexVector) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn series(r: &mut Report, section: &str, s: &DistributionSeries) {
    r.series(section, &s.labels, &s.rows, 0);
    r.series(&format!("{section}.cesaro"), &s.labels, &s.cesaro, 1);
}

fn evolution(p: EvolutionPayload, cx: &Context, r: &mut Report) -> Res<()> {
    let (ev, known) = match (&p.corpus, &p.op) {
        (Some(_), Some(_)) => {
            return Err(ScenarioError::schema("payload", "give either op and start or corpus, not both"))
        }
        (Some(family), None) => {
            let mut rng = cx.corpus_rng(r);
            match *family {
                EvolutionCorpus::UnitaryFixed { dim, fixed } => {
                    if dim == 0 || fixed > dim {
                        return Err(ScenarioError::schema("payload.corpus", "need 0 <= fixed <= dim, dim >= 1"));
                    }
                    let (u, basis) = corpus::unitary_with_fixed_subspace(&mut rng, dim, fixed);
                    let s = corpus::gaussian_vector(&mut rng, dim);
                    let known = basis.project(&s);
                    (Evolution::new(u, s).map_err(at("payload.corpus"))?, Some(known))
                }
                EvolutionCorpus::SplitSpectrum { dim, big, w_max } => {
                    if dim == 0 || big > dim || !(0.0..1.0).contains(&w_max) {
                        return Err(ScenarioError::schema(
                            "payload.corpus",
                            "need big <= dim, dim >= 1 and 0 <= w_max < 1",
                        ));
                    }
                    let op = corpus::split_spectrum_operator(&mut rng, dim, big, w_max);
                    let s = corpus::gaussian_vector(&mut rng, dim);
                    (Evolution::new(op, s).map_err(at("payload.corpus"))?, None)
                }
                EvolutionCorpus::Stochastic { dim, sparsity } => {
                    if dim == 0 || !(0.0..1.0).contains(&sparsity) {
                        return Err(ScenarioError::schema("payload.corpus", "need dim >= 1 and 0 <= sparsity < 1"));
                    }
                    let m = corpus::random_stochastic(&mut rng, dim, sparsity);
                    let p0 = corpus::random_distribution(&mut rng, dim, 0.0);
                    let (ev, _) = random_walk_evolution(&m, &p0).map_err(at("payload.corpus"))?;
                    (ev, None)
                }
            }
        }
        (None, Some(op)) => {
            let op = cmatrix(op, "payload.op")?;
            let start = cvector(required(&p.start, "payload.start")?, "payload.start")?;
            (Evolution::new(op, start).map_err(at("payload.op"))?, None)
        }
        (None, None) => return Err(ScenarioError::schema("payload.op", "missing required field (or give corpus)")),
    };
    r.verdict("dim", ev.dim());

    let stability = stability_check(&ev, cx.base_horizon, cx.tol).map_err(at("payload"))?;
    r.verdict("stability", &stability);
    for (t, x) in trajectory(&ev, cx.horizon).iter().enumerate() {
        r.record("trajectory", Some(t), "norm", x.norm());
    }
    for (k, x) in cesaro_averages(&ev, cx.horizon).iter().enumerate() {
        r.record("cesaro", Some(k + 1), "norm", x.norm());
    }

    if stability.verdict == Verdict::Stable || p.force {
        let opts = ErgodicOptions {
            tol: cx.tol,
            base_horizon: cx.base_horizon,
            force: p.force,
            cesaro_horizon: p.cesaro_check.unwrap_or(ErgodicOptions::default().cesaro_horizon),
            method: match p.method {
                LimitMethodSpec::Spectral => LimitMethod::SpectralProjector,
                LimitMethodSpec::Cesaro => LimitMethod::CesaroExtrapolation,
            },
            ..ErgodicOptions::default()
        };
        let limit = mean_ergodic_limit_with(&ev, &opts).map_err(at("payload.method"))?;
        r.verdict(
            "limit",
            json!({
                "method": limit.method,
                "vector": cjson(&limit.limit),
                "cesaro_residual": limit.residual,
                "stationarity": limit.stationarity,
            }),
        );
        if let Some(known) = known {
            let error = (&limit.limit - &known).norm();
            r.verdict(
                "known_projection",
                json!({
                    "error": error,
                    "matches": error <= cx.tol * (1.0 + ev.start().norm()),
                }),
            );
        }
    } else {
        r.verdict("limit", Value::Null);
        r.warn(format!(
            "limit skipped: stability verdict is {:?}; set payload.force to compute it anyway",
            stability.verdict
        ));
    }

    if p.split {
        let split = spectral_split(ev.op(), ev.start(), BAND_TOL).map_err(at("payload.split"))?;
        r.verdict(
            "split",
            json!({
                "cut": split.cut(),
                "n_dim": split.n_basis.dim(),
                "s_n_norm": split.s_n.norm(),
                "s_w_norm": split.s_w.norm(),
                "w_spectral_radius": split.w_spectral_radius,
                "s_n": cjson(&split.s_n),
                "s_w": cjson(&split.s_w),
            }),
        );
        let mut w = split.s_w.clone();
        for t in 0..=cx.horizon {
            r.record("split", Some(t), "w_norm", w.norm());
            w = ev.op() * w;
        }
    }

    if let Some(other) = &p.compare_start {
        let other = ev
            .with_start(cvector(other, "payload.compare_start")?)
            .map_err(at("payload.compare_start"))?;
        let eq = equivalence_check(&ev, &other, cx.horizon.max(4), cx.tol)
            .map_err(at("payload.compare_start"))?;
        for (t, d) in eq.decay.iter().enumerate() {
            r.record("equivalence", Some(t), "distance", *d);
        }
        r.verdict(
            "equivalence",
            json!({ "verdict": eq.verdict, "window_maxima": eq.window_maxima }),
        );
    }
    Ok(())
}

fn sampling(p: SamplingPayload, cx: &Context, r: &mut Report) -> Res<()> {
    if let Some(c) = &p.corpus {
        if p.op.is_some() || p.start.is_some() || p.sampler.is_some() {
            return Err(ScenarioError::schema("payload", "give either op/start/sampler or corpus, not both"));
        }
        if c.max_dim < 2 || c.count == 0 {
            return Err(ScenarioError::schema("payload.corpus", "need count >= 1 and max_dim >= 2"));
        }
        let mut rng = cx.corpus_rng(r);
        let (mut clean, mut agree, mut inconclusive, mut mismatch) = (0usize, 0usize, 0usize, 0usize);
        let mut tally = std::collections::BTreeMap::<String, usize>::new();
        for i in 0..c.count {
            let inst = corpus::sampling_instance(&mut rng, c.max_dim);
            let path = format!("payload.corpus[{i}]");
            let f = SamplingFunction::new(inst.sampler.clone()).map_err(at(path.clone()))?;
            let ev = Evolution::new(inst.op.clone(), inst.start.clone()).map_err(at(path.clone()))?;
            let v = sampling_verdict(&f, &ev, cx.base_horizon, cx.tol).map_err(at(path))?;
            *tally.entry(format!("{:?}/{:?}", v.bounded, v.converges)).or_default() += 1;
            r.record("corpus", Some(i), "max_norm", v.max_norm);
            r.record("corpus", Some(i), "oscillation", v.oscillation);
            if v.bounded.is_clean() && v.converges.is_clean() {
                clean += 1;
                agree += usize::from(v.bounded == v.converges);
                let truly_bounded = !inst.jordan_on_circle && !inst.bands.contains(&corpus::Band::Outside);
                mismatch += usize::from((v.bounded == Tristate::Yes) != truly_bounded);
            } else {
                inconclusive += 1;
            }
        }
        r.verdict(
            "corpus",
            json!({
                "count": c.count,
                "clean": clean,
                "bounded_iff_converges": agree,
                "inconclusive": inconclusive,
                "inconclusive_rate": inconclusive as f64 / c.count as f64,
                "construction_mismatches": mismatch,
                "bounded/converges": tally,
            }),
        );
        if agree != clean {
            r.warn(format!("{} clean verdicts split boundedness from convergence", clean - agree));
        }
        return Ok(());
    }
    let op = cmatrix(required(&p.op, "payload.op")?, "payload.op")?;
    let start = cvector(required(&p.start, "payload.start")?, "payload.start")?;
    let ev = Evolution::new(op, start).map_err(at("payload.op"))?;
    let f = match &p.sampler {
        Some(m) => SamplingFunction::new(cmatrix(m, "payload.sampler")?).map_err(at("payload.sampler"))?,
        None => SamplingFunction::identity(ev.dim()),
    };
    let v = sampling_verdict(&f, &ev, cx.base_horizon, cx.tol).map_err(at("payload.sampler"))?;
    r.verdict(
        "sampling",
        json!({
            "bounded": v.bounded,
            "converges": v.converges,
            "limit": v.limit.as_ref().map(cjson),
            "max_norm": v.max_norm,
            "empirical_bounded": v.empirical_bounded,
            "empirical_converges": v.empirical_converges,
            "oscillation": v.oscillation,
            "final_average": v.final_average.as_ref().map(cjson),
            "spectral": {
                "visible_dim": v.spectral.visible_dim,
                "max_visible_modulus": v.spectral.max_visible_modulus,
                "bounded": v.spectral.bounded,
                "limit": v.spectral.limit.as_ref().map(cjson),
            },
            "horizon_used": v.horizon_used,
        }),
    );
    let values = sample_values(&f, &ev, p.values).map_err(at("payload.sampler"))?;
    let averages = sample_averages(&f, &ev, p.values).map_err(at("payload.sampler"))?;
    for (section, rows) in [("values", &values), ("averages", &averages)] {
        for (k, x) in rows.iter().enumerate() {
            for (j, z) in x.iter().enumerate() {
                r.record(section, Some(k + 1), format!("f{j}.re"), z.re);
                r.record(section, Some(k + 1), format!("f{j}.im"), z.im);
            }
        }
    }
    Ok(())
}

fn markov(p: MarkovPayload, cx: &Context, r: &mut Report) -> Res<()> {
    let (ev, obs) = if let Some(m) = &p.transition {
        if p.op.is_some() || p.observable.is_some() {
            return Err(ScenarioError::schema("payload", "transition excludes op and observable"));
        }
        let m = rmatrix(m, "payload.transition")?;
        let p0 = rvector(required(&p.start, "payload.start")?, "payload.start")?;
        let (ev, coords) = random_walk_evolution(&m, &p0).map_err(at("payload.transition"))?;
        let obs = match &p.labeling {
            Some(l) if l.len() != ev.dim() => {
                return Err(ScenarioError::schema(
                    "payload.labeling",
                    format!("{} labels for {} states", l.len(), ev.dim()),
                ))
            }
            Some(l) => hidden_observable(l).map_err(at("payload.labeling"))?,
            None => coords,
        };
        (ev, obs)
    } else {
        let op = cmatrix(required(&p.op, "payload.op")?, "payload.op")?;
        let start = cvector(required(&p.start, "payload.start")?, "payload.start")?;
        let ev = Evolution::new(op, start).map_err(at("payload.op"))?;
        let spec = required(&p.observable, "payload.observable")?;
        let f = cmatrix(&spec.functionals, "payload.observable.functionals")?;
        let obs = Observable::new(spec.labels.clone(), f, DISTRIBUTION_TOL)
            .map_err(at("payload.observable"))?;
        (ev, obs)
    };
    r.verdict("labels", obs.labels());
    let s = chain_distributions(&obs, &ev, cx.horizon).map_err(at("payload.start"))?;
    series(r, "distribution", &s);
    r.verdict("clamps", json!({ "count": s.clamp_count, "max": s.max_clamp }));
    if s.clamp_count > 0 {
        r.warn(format!("{} negative entries within tolerance reported as zero", s.clamp_count));
    }
    if let Some(label) = &p.indicator {
        let ind = indicator_chain(&obs, label).map_err(at("payload.indicator"))?;
        let s = chain_distributions(&ind, &ev, cx.horizon).map_err(at("payload.indicator"))?;
        series(r, "indicator", &s);
    }
    if p.limit {
        let lim = limit_distribution(&obs, &ev, cx.tol).map_err(at("payload.limit"))?;
        r.verdict(
            "limit_distribution",
            json!({
                "labels": lim.labels,
                "probs": lim.probs,
                "cesaro_check": lim.cesaro_check,
                "cesaro_gap": lim.cesaro_gap,
                "stationarity": lim.limit.stationarity,
            }),
        );
    }
    Ok(())
}

fn process_report(model: &ProcessModel, prefix: &str, enumerate_to: Option<usize>, cx: &Context, r: &mut Report) -> Res<Value> {
    let labels = model.alphabet().to_vec();
    let mut rows = Vec::with_capacity(cx.horizon + 1);
    for t in 0..=cx.horizon {
        rows.push(process_marginal(model, t).map_err(at(prefix))?);
    }
    r.series(&format!("{prefix}marginal"), &labels, &rows, 0);
    let (ev, obs) = process_evolution(model).map_err(at(prefix))?;
    let validated = chain_distributions(&obs, &ev, cx.horizon).map_err(at(prefix))?;
    let mut out = json!({ "dim": model.dim(), "alphabet": labels, "clamps": validated.clamp_count });
    if let Some(depth) = enumerate_to {
        let mut worst: f64 = 0.0;
        for (t, via) in rows.iter().enumerate().take(depth + 1) {
            let brute = enumerate_process_marginals(model, t).map_err(at("payload.enumerate_to"))?;
            worst = brute.iter().zip(via).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
        }
        out["enumeration_max_gap"] = json!(worst);
        out["enumeration_agrees"] = json!(worst <= cx.tol);
    }
    Ok(out)
}

fn process(p: ProcessPayload, cx: &Context, r: &mut Report) -> Res<()> {
    if let Some(c) = &p.corpus {
        if c.max_dim == 0 || c.count == 0 {
            return Err(ScenarioError::schema("payload.corpus", "need count >= 1 and max_dim >= 1"));
        }
        let mut rng = cx.corpus_rng(r);
        let mut models = Vec::new();
        let mut worst: f64 = 0.0;
        for i in 0..c.count {
            let n = 1 + (i % c.max_dim);
            let model = corpus::random_process_model(&mut rng, n, c.scramble);
            let v = process_report(&model, &format!("model[{i}]."), p.enumerate_to, cx, r)?;
            worst = worst.max(v["enumeration_max_gap"].as_f64().unwrap_or(0.0));
            models.push(v);
        }
        r.verdict("models", models);
        if p.enumerate_to.is_some() {
            r.verdict("enumeration_max_gap", worst);
            r.verdict("enumeration_agrees", worst <= cx.tol);
        }
        return Ok(());
    }
    let model = match p.preset {
        Some(ProcessPreset::FairCoin) => ProcessModel::fair_coin(),
        Some(ProcessPreset::Alternator) => ProcessModel::alternator(),
        None => {
            let ops = required(&p.ops, "payload.ops")?
                .iter()
                .enumerate()
                .map(|(i, m)| rmatrix(m, &format!("payload.ops[{i}]")))
                .collect::<Res<Vec<_>>>()?;
            let alphabet = match &p.alphabet {
                Some(a) => a.clone(),
                None => (0..ops.len()).map(|a| a.to_string()).collect(),
            };
            let init = DVector::from_vec(required(&p.init, "payload.init")?.clone());
            let eval = DVector::from_vec(required(&p.eval, "payload.eval")?.clone());
            ProcessModel::new(alphabet, ops, init, eval).map_err(at("payload.ops"))?
        }
    };
    let v = process_report(&model, "", p.enumerate_to, cx, r)?;
    r.verdict("model", v);
    Ok(())
}

fn channel(spec: &ChannelSpec, basis: &HermitianBasis, path: &str) -> Res<DMatrix<f64>> {
    let m = basis.dim();
    match spec {
        ChannelSpec::Named(NamedChannel::Zero) => Ok(DMatrix::zeros(m, m)),
        ChannelSpec::Named(NamedChannel::Identity) => Ok(DMatrix::identity(m, m)),
        ChannelSpec::Matrix { matrix } => {
            let e = rmatrix(matrix, &format!("{path}.matrix"))?;
            if e.nrows() != m || e.ncols() != m {
                return Err(ScenarioError::schema(
                    format!("{path}.matrix"),
                    format!("expected {m}x{m}, got {}x{}", e.nrows(), e.ncols()),
                ));
            }
            Ok(e)
        }
        ChannelSpec::Conjugation { unitary, weight } => {
            let u = cmatrix(unitary, &format!("{path}.unitary"))?;
            if u.nrows() != basis.d() || u.ncols() != basis.d() {
                return Err(ScenarioError::schema(format!("{path}.unitary"), "unitary must be d x d"));
            }
            Ok(conjugation_channel(basis, &u, *weight))
        }
    }
}

fn walk(p: WalkPayload, cx: &Context, r: &mut Report) -> Res<()> {
    let w = if let Some(c) = &p.corpus {
        if c.sites == 0 || c.d == 0 {
            return Err(ScenarioError::schema("payload.corpus", "need sites >= 1 and d >= 1"));
        }
        let mut rng = cx.corpus_rng(r);
        corpus::random_gudder_walk(&mut rng, c.sites, c.d)
    } else {
        let d = *required(&p.d, "payload.d")?;
        if d == 0 {
            return Err(ScenarioError::schema("payload.d", "must be at least 1"));
        }
        let basis = HermitianBasis::new(d);
        let grid = required(&p.channels, "payload.channels")?;
        let channels = grid
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, e)| channel(e, &basis, &format!("payload.channels[{i}][{j}]")))
                    .collect::<Res<Vec<_>>>()
            })
            .collect::<Res<Vec<_>>>()?;
        match (&p.state, &p.localized) {
            (Some(_), Some(_)) => {
                return Err(ScenarioError::schema("payload", "give either state or localized, not both"))
            }
            (Some(state), None) => {
                let state = state
                    .iter()
                    .enumerate()
                    .map(|(i, m)| cmatrix(m, &format!("payload.state[{i}]")))
                    .collect::<Res<Vec<_>>>()?;
                GudderWalk::new(d, channels, state).map_err(at("payload.channels"))?
            }
            (None, Some(loc)) => {
                let rho = cmatrix(&loc.rho, "payload.localized.rho")?;
                GudderWalk::localized(d, channels, loc.site, rho).map_err(at("payload.localized"))?
            }
            (None, None) => return Err(ScenarioError::schema("payload.state", "missing required field (or give localized)")),
        }
    };
    let labels: Vec<String> = (1..=w.sites()).map(|i| i.to_string()).collect();
    r.verdict("sites", w.sites());
    r.verdict("d", w.d());

    let mut rows = Vec::with_capacity(cx.horizon + 1);
    let mut current = w.clone();
    let mut worst_leak: f64 = 0.0;
    for t in 0..=cx.horizon {
        let dist = current.site_distribution();
        let total: f64 = dist.iter().sum();
        worst_leak = worst_leak.max((total - 1.0).abs());
        r.record("trace", Some(t), "total", total);
        rows.push(dist);
        if t < cx.horizon {
            current = gudder_step(&current).map_err(at(format!("payload.channels (step {})", t + 1)))?;
        }
    }
    r.series("sites", &labels, &rows, 0);
    r.verdict("max_trace_deviation", worst_leak);

    let (ev, obs) = w.evolution().map_err(at("payload.channels"))?;
    let chain = chain_distributions(&obs, &ev, cx.horizon).map_err(at("payload.channels"))?;
    let gap = chain
        .rows
        .iter()
        .zip(&rows)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    r.verdict("block_evolution_gap", gap);

    let mut paths = Vec::new();
    for (k, path) in p.paths.iter().enumerate() {
        let prob = walk_path_probability(&w, path).map_err(at(format!("payload.paths[{k}]")))?;
        paths.push(json!({ "path": path, "probability": prob }));
    }
    r.verdict("paths", paths);

    if let Some(len) = p.enumerate_to {
        let n = w.sites();
        let count = (n as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
        if count > 1 << 20 {
            return Err(at("payload.enumerate_to")(Error::TooLarge {
                size: count,
                limit: 1 << 20,
            }));
        }
        let mut totals = Vec::new();
        for l in 1..=len {
            let mut total = 0.0;
            let mut path = vec![0usize; l];
            loop {
                total += walk_path_probability(&w, &path).map_err(at("payload.enumerate_to"))?;
                let Some(pos) = path.iter().rposition(|&i| i + 1 < n) else { break };
                path[pos] += 1;
                for x in &mut path[pos + 1..] {
                    *x = 0;
                }
            }
            r.record("path_total", Some(l), "total", total);
            totals.push(total);
        }
        let worst = totals.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);
        r.verdict("path_totals_max_deviation", worst);
    }
    Ok(())
}

fn schrodinger(p: SchrodingerPayload, cx: &Context, r: &mut Report) -> Res<()> {
    let u = cmatrix(&p.unitary, "payload.unitary")?;
    let v = cvector(&p.wave, "payload.wave")?;
    let wave = if p.normalize {
        WaveFunction::normalized(v)
    } else {
        WaveFunction::new(v)
    }
    .map_err(at("payload.wave"))?;
    let se = schrodinger_evolution(&u, &wave).map_err(at("payload.unitary"))?;
    let deviation = se.verify(cx.horizon).map_err(at("payload.unitary"))?;
    r.verdict("decode_deviation", deviation);
    let stability = stability_check(se.evolution(), cx.base_horizon, cx.tol).map_err(at("payload.unitary"))?;
    let stable = stability.verdict == Verdict::Stable;
    r.verdict("stability", &stability);

    let d = wave.dim();
    let basis = match &p.basis {
        Some(b) => b
            .iter()
            .enumerate()
            .map(|(i, v)| cvector(v, &format!("payload.basis[{i}]")))
            .collect::<Res<Vec<_>>>()?,
        None => (0..d)
            .map(|i| {
                let mut e = ComplexVector::zeros(d);
                e[i] = Complex64::new(1.0, 0.0);
                e
            })
            .collect(),
    };
    r.verdict("born_t0", born_probabilities(&wave, &basis).map_err(at("payload.basis"))?);
    let born = se.born_observable(&basis).map_err(at("payload.basis"))?;
    let s = chain_distributions(&born, se.evolution(), cx.horizon).map_err(at("payload.basis"))?;
    series(r, "born", &s);
    if stable {
        let lim = limit_distribution(&born, se.evolution(), cx.tol).map_err(at("payload.basis"))?;
        r.verdict("born_limit", json!({ "labels": lim.labels, "probs": lim.probs, "cesaro_gap": lim.cesaro_gap }));
    } else {
        r.warn(format!("limits skipped: stability verdict is {:?}", stability.verdict));
    }

    if let Some(m) = &p.measurement {
        let m = Measurement::new(cmatrix(m, "payload.measurement")?).map_err(at("payload.measurement"))?;
        r.verdict(
            "expectation",
            measurement_expectation(&m, &wave).map_err(at("payload.measurement"))?,
        );
        let obs = se.measurement_observable(&m).map_err(at("payload.measurement"))?;
        let s = chain_distributions(&obs, se.evolution(), cx.horizon).map_err(at("payload.measurement"))?;
        series(r, "measurement", &s);
        if stable {
            let lim = limit_distribution(&obs, se.evolution(), cx.tol).map_err(at("payload.measurement"))?;
            r.verdict(
                "measurement_limit",
                json!({ "labels": lim.labels, "probs": lim.probs, "cesaro_gap": lim.cesaro_gap }),
            );
        }
    }
    Ok(())
}

fn probability(spec: &ProbSpec, path: &str) -> Res<Result<BigRational, f64>> {
    match spec {
        ProbSpec::Number(x) => Ok(Err(*x)),
        ProbSpec::Text(s) => s
            .trim()
            .parse::<BigRational>()
            .map(Ok)
            .map_err(|e| ScenarioError::schema(path, format!("expected \"p/q\": {e}"))),
    }
}

fn coupling_problem(spec: &CouplingSpec, tol: f64) -> Res<CouplingProblem> {
    let mut parsed = Vec::new();
    for (i, c) in spec.constraints.iter().enumerate() {
        let cells = c
            .target
            .iter()
            .enumerate()
            .map(|(k, x)| probability(x, &format!("payload.coupling.constraints[{i}].target[{k}]")))
            .collect::<Res<Vec<_>>>()?;
        parsed.push(cells);
    }
    // exact arithmetic only when every target is a rational string
    let exact = parsed.iter().flatten().all(|x| x.is_ok());
    let constraints = spec
        .constraints
        .iter()
        .zip(parsed)
        .map(|(c, cells)| MarginalConstraint {
            vars: c.vars.clone(),
            target: if exact {
                Table::Exact(cells.into_iter().map(|x| x.expect("checked exact")).collect())
            } else {
                Table::Float(
                    cells
                        .into_iter()
                        .map(|x| match x {
                            Ok(q) => num_traits::ToPrimitive::to_f64(&q).unwrap_or(f64::NAN),
                            Err(f) => f,
                        })
                        .collect(),
                )
            },
        })
        .collect();
    CouplingProblem::new(spec.alphabets.clone(), constraints, tol).map_err(at("payload.coupling"))
}

fn jointness(p: JointnessPayload, cx: &Context, r: &mut Report) -> Res<()> {
    let ms = p
        .measurements
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let path = format!("payload.measurements[{i}].matrix");
            Measurement::new(cmatrix(&m.matrix, &path)?).map_err(at(path))
        })
        .collect::<Res<Vec<_>>>()?;
    let names: Vec<&str> = p.measurements.iter().map(|m| m.name.as_str()).collect();
    let density = match (&p.density, &p.wave) {
        (Some(_), Some(_)) => return Err(ScenarioError::schema("payload", "give either density or wave, not both")),
        (Some(d), None) => Some(GeneralizedDensity::new(cmatrix(d, "payload.density")?).map_err(at("payload.density"))?),
        (None, Some(w)) => {
            let wave = WaveFunction::new(cvector(w, "payload.wave")?).map_err(at("payload.wave"))?;
            Some(GeneralizedDensity::from_wave(&wave))
        }
        (None, None) => None,
    };
    if let Some(d) = &density {
        r.verdict("density_psd", d.is_psd());
        r.verdict("density_min_eigenvalue", d.min_eigenvalue());
        let mut singles = Vec::new();
        for (i, m) in ms.iter().enumerate() {
            let e = measurement_expectation(m, QuantumState::Density(d))
                .map_err(at(format!("payload.measurements[{i}]")))?;
            singles.push(json!({ "name": names[i], "expectation": e }));
        }
        r.verdict("singles", singles);
    }

    let pairs: Vec<[usize; 2]> = match &p.pairs {
        Some(pairs) => {
            for (k, &[i, j]) in pairs.iter().enumerate() {
                if i >= ms.len() || j >= ms.len() || i == j {
                    return Err(ScenarioError::schema(format!("payload.pairs[{k}]"), "indices must name two distinct measurements"));
                }
            }
            pairs.clone()
        }
        None => (0..ms.len())
            .flat_map(|i| (i + 1..ms.len()).map(move |j| [i, j]))
            .collect(),
    };
    let mut entries = Vec::new();
    let mut expectations = std::collections::BTreeMap::new();
    let mut tables = Vec::new();
    let mut all_commute = true;
    for &[i, j] in &pairs {
        let path = format!("payload.measurements[{i}]/[{j}]");
        let h = heisenberg_check(&ms[i], &ms[j], cx.tol).map_err(at(path.clone()))?;
        let mut entry = json!({ "pair": [names[i], names[j]], "commutes": h.commutes() });
        match &h {
            Heisenberg::NotCommute { commutator_norm } => {
                all_commute = false;
                entry["commutator_norm"] = json!(commutator_norm);
            }
            Heisenberg::Commute(joint) => {
                entry["atoms"] = json!(joint
                    .atoms()
                    .iter()
                    .map(|&(a, b)| [joint.a_values()[a], joint.b_values()[b]])
                    .collect::<Vec<_>>());
                if let Some(d) = &density {
                    let e = pairwise_expectation(&ms[i], &ms[j], d).map_err(at(path.clone()))?;
                    let table = joint.table(d).map_err(at(path.clone()))?;
                    entry["expectation"] = json!(e);
                    entry["table"] = json!(table);
                    expectations.insert((i, j), e);
                    tables.push(MarginalConstraint {
                        vars: vec![i, j],
                        target: Table::Float(table),
                    });
                }
            }
        }
        entries.push(entry);
    }
    r.verdict("pairs", entries);

    let pm1 = |m: &Measurement| m.values().iter().all(|v| (v.abs() - 1.0).abs() <= 1e-9);
    if ms.len() == 3 && ms.iter().all(pm1) {
        let e = |i, j| expectations.get(&(i, j)).copied();
        if let (Some(xy), Some(yz), Some(xz)) = (e(0, 1), e(1, 2), e(0, 2)) {
            let bell = bell_inequality_check(xy, yz, xz, cx.tol).map_err(at("payload.measurements"))?;
            r.verdict("bell", bell);
        }
    }

    if density.is_some() && all_commute && !tables.is_empty() {
        let alphabets = ms
            .iter()
            .map(|m| m.values().iter().map(|v| format!("{v}")).collect())
            .collect();
        let problem = CouplingProblem::new(alphabets, tables, cx.tol.max(1e-9))
            .map_err(at("payload.measurements"))?;
        let report = coupling_feasibility(&problem).map_err(at("payload.measurements"))?;
        r.verdict("pairwise_coupling", report);
    }

    if let Some(spec) = &p.coupling {
        let problem = coupling_problem(spec, cx.tol)?;
        let report = coupling_feasibility(&problem).map_err(at("payload.coupling"))?;
        r.verdict("coupling", report);
    }
    Ok(())
}

fn bell_example(r: &mut Report) -> Res<()> {
    let ex = bell_counterexample().map_err(at("payload"))?;
    for e in &ex.expectations {
        r.record("expectation", None, e.pair.clone(), e.value);
    }
    r.verdict("expectations", ex.expectations.iter().map(|e| e.value).collect::<Vec<_>>());
    r.verdict("violated", ex.bell.violated);
    r.verdict("example", &ex);
    Ok(())
}
