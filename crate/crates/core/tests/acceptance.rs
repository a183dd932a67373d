//! Acceptance gate: one test per release criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`).
//!
//! Criteria 2, 4, 5, and 6 need desk-scale trained artifacts (2000-set
//! dataset, trained autoencoder, five trained couplings, two trained
//! baselines). Those are built once and cached under
//! `target/acceptance_cache/`, so the first run trains for a while and
//! later runs start from disk. Delete the cache directory to retrain.

mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{GOLDEN_COUNTS, GOLDEN_LAW_MATRIX, SEMI_RELATIVE_DEVIATIONS};
use embalg::algebra::laws::LawCatalog;
use embalg::algebra::{equivalent_term, parse_term, random_term};
use embalg::embed::{reconstruction_grad_check, train_autoencoder, EmbedArch, EmbedConfig};
use embalg::harness::{eval_consistency, eval_performance, iou, spearman};
use embalg::mirrored::{law_matrix, riesz_pair, LawCheckConfig};
use embalg::setgen::{gen_dataset, rasterize, realize_term_on_grids, sample_set_spec};
use embalg::transport::{
    baseline_grad_check, predict_latent, random_latent, train_baseline, train_transport,
    transport_grad_check, TransportConfig,
};
use embalg::{
    BaselineKind, CandidateOp, Dataset, DirectBaseline, EmbedModel, EvalConfig, LatentOps,
    LatentVector, MirroredPair, OperationSymbol, SeedRng, Term, TransportModel,
};

/// Prints the criterion verdict even when an assertion unwinds the test.
struct Criterion {
    name: &'static str,
    start: Instant,
    passed: bool,
}

impl Criterion {
    fn begin(name: &'static str) -> Self {
        Criterion { name, start: Instant::now(), passed: false }
    }

    fn pass(mut self) {
        self.passed = true;
        println!("criterion {}: PASS ({:.1?})", self.name, self.start.elapsed());
    }

    fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}

impl Drop for Criterion {
    fn drop(&mut self) {
        if !self.passed {
            println!("criterion {}: FAIL ({:.1?})", self.name, self.start.elapsed());
        }
    }
}

const MATRIX_SEED: u64 = 12345;
const DATA_SEED: u64 = 7;
const EMBED_SEED: u64 = 11;
const EVAL_SEED: u64 = 2026;
const LATENT_DIM: usize = 64;

/// The five couplings of the ranking experiment, from fully lattice-lawful
/// down to lawless, with their reference law counts.
const DESK_PAIRS: [(CandidateOp, CandidateOp, usize); 5] = [
    (CandidateOp::Max, CandidateOp::Min, 8),
    (CandidateOp::Min, CandidateOp::Add, 6),
    (CandidateOp::Max, CandidateOp::ScaledAdd, 4),
    (CandidateOp::Add, CandidateOp::Sub, 2),
    (CandidateOp::Sub, CandidateOp::CyclicAdd, 0),
];

struct Desk {
    dataset: Dataset,
    embed: EmbedModel,
    latents: Vec<LatentVector>,
    pairs: Vec<TransportModel>,
    baselines: Vec<DirectBaseline>,
}

static DESK: OnceLock<Desk> = OnceLock::new();

fn cache_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../target/acceptance_cache")
}

fn pair_path(dir: &Path, meet: CandidateOp, join: CandidateOp) -> PathBuf {
    dir.join(format!("pair_{}_{}.stnw", meet.id(), join.id()))
}

fn baseline_path(dir: &Path, kind: BaselineKind) -> PathBuf {
    dir.join(format!("baseline_{}.stnw", kind.id()))
}

fn desk() -> &'static Desk {
    DESK.get_or_init(|| {
        let dir = cache_dir();
        fs::create_dir_all(&dir).expect("cache dir is writable");
        load_desk(&dir).unwrap_or_else(|| build_desk(&dir))
    })
}

fn load_desk(dir: &Path) -> Option<Desk> {
    let dataset = Dataset::load(&dir.join("desk_data.stds")).ok()?;
    if dataset.len() != 2000 || dataset.resolution() != 32 {
        return None;
    }
    let embed = EmbedModel::load(&dir.join("desk_embed.stnw")).ok()?;
    if embed.arch().latent_dim != LATENT_DIM || embed.arch().resolution != 32 {
        return None;
    }
    let mut pairs = Vec::new();
    for &(meet, join, _) in &DESK_PAIRS {
        let model = TransportModel::load(&pair_path(dir, meet, join)).ok()?;
        if model.pair().meet() != meet || model.pair().join() != join {
            return None;
        }
        pairs.push(model);
    }
    let mut baselines = Vec::new();
    for kind in [BaselineKind::MlpConcat, BaselineKind::Symmetric] {
        let model = DirectBaseline::load(&baseline_path(dir, kind)).ok()?;
        if model.kind() != kind {
            return None;
        }
        baselines.push(model);
    }
    let latents = embed.encode_dataset(&dataset);
    Some(Desk { dataset, embed, latents, pairs, baselines })
}

fn build_desk(dir: &Path) -> Desk {
    println!("building desk artifacts under {} (first run only)", dir.display());
    let t0 = Instant::now();
    let dataset = gen_dataset(2000, 32, DATA_SEED);
    dataset.save(&dir.join("desk_data.stds")).expect("save dataset");

    let (embed, report) = train_autoencoder(&dataset, &EmbedConfig::default(), EMBED_SEED)
        .expect("autoencoder training converges");
    embed.save(&dir.join("desk_embed.stnw")).expect("save embedding");
    println!(
        "  autoencoder trained: best val {:.4} at epoch {} ({:.0?})",
        report.best_val,
        report.best_epoch,
        t0.elapsed()
    );
    let latents = embed.encode_dataset(&dataset);

    let cfg = TransportConfig::default();
    let mut pairs = Vec::new();
    for (i, &(meet, join, _)) in DESK_PAIRS.iter().enumerate() {
        let t = Instant::now();
        let pair = MirroredPair::new(meet, join);
        let (model, report) =
            train_transport(&embed, &dataset, &latents, pair, &cfg, 100 + i as u64)
                .expect("coupling training converges");
        model.save(&pair_path(dir, meet, join)).expect("save coupling");
        println!(
            "  trained ({}, {}): best val {:.4} ({:.0?})",
            meet.id(),
            join.id(),
            report.best_val,
            t.elapsed()
        );
        pairs.push(model);
    }

    let bcfg = TransportConfig::baseline_default();
    let mut baselines = Vec::new();
    for (i, kind) in [BaselineKind::MlpConcat, BaselineKind::Symmetric].into_iter().enumerate()
    {
        let t = Instant::now();
        let (model, report) =
            train_baseline(&embed, &dataset, &latents, kind, &bcfg, 200 + i as u64)
                .expect("baseline training converges");
        model.save(&baseline_path(dir, kind)).expect("save baseline");
        println!(
            "  trained baseline {}: best val {:.4} ({:.0?})",
            kind.id(),
            report.best_val,
            t.elapsed()
        );
        baselines.push(model);
    }

    println!("desk artifacts ready ({:.0?})", t0.elapsed());
    Desk { dataset, embed, latents, pairs, baselines }
}

/// Criterion 1: the 28×8 law matrix is reproduced cell for cell, including
/// the per-row counts. The reference check (f32 realization, dim 1024,
/// absolute+relative tolerance) matches the table exactly; the strict
/// double-precision policy at dim 16 with tau 1e-9 is also run and must
/// deviate in exactly the three documented borderline cells, no others.
#[test]
fn criterion_1_law_matrix_reproduction() {
    let c = Criterion::begin("1 (law matrix reproduction)");

    let matrix = law_matrix(&LawCheckConfig::reference(), MATRIX_SEED)
        .expect("reference dimension is square");
    assert_eq!(matrix.rows.len(), GOLDEN_LAW_MATRIX.len());
    let mut counts = Vec::new();
    for golden in &GOLDEN_LAW_MATRIX {
        let meet = CandidateOp::from_id(golden.meet).expect("known op");
        let join = CandidateOp::from_id(golden.join).expect("known op");
        let row = matrix.row(meet, join).expect("pair present");
        assert_eq!(
            row.satisfied, golden.satisfied,
            "({}, {}) row disagrees",
            golden.meet, golden.join
        );
        assert_eq!(row.count(), golden.count);
        counts.push(row.count());
    }
    assert_eq!(counts, GOLDEN_COUNTS, "count column disagrees");

    let strict = law_matrix(&LawCheckConfig::semi_relative(), MATRIX_SEED)
        .expect("strict dimension is square");
    let mut deviations = Vec::new();
    for golden in &GOLDEN_LAW_MATRIX {
        let meet = CandidateOp::from_id(golden.meet).expect("known op");
        let join = CandidateOp::from_id(golden.join).expect("known op");
        let row = strict.row(meet, join).expect("pair present");
        for (li, (&got, &expected)) in
            row.satisfied.iter().zip(golden.satisfied.iter()).enumerate()
        {
            if got != expected {
                deviations.push((golden.meet, golden.join, li, got));
            }
        }
    }
    assert_eq!(
        deviations,
        SEMI_RELATIVE_DEVIATIONS.to_vec(),
        "strict-policy deviation set changed"
    );

    assert!(c.elapsed() < Duration::from_secs(10), "over budget: {:?}", c.elapsed());
    c.pass();
}

fn assert_round_trip_bitwise(model: &TransportModel, vectors: usize, seed: u64) {
    let mut rng = SeedRng::new(seed);
    for i in 0..vectors {
        let z = random_latent(model.latent_dim(), &mut rng);
        let back = model.phi_inverse(&model.phi_forward(&z));
        for (k, (a, b)) in z.iter().zip(back.iter()).enumerate() {
            assert_eq!(
                a.to_bits(),
                b.to_bits(),
                "vector {i} coordinate {k}: {a} came back as {b}"
            );
        }
    }
}

/// Criterion 2: the coupling inverse undoes the forward map bit for bit on
/// 10^4 random latent vectors, for freshly randomized and for trained
/// parameters.
#[test]
fn criterion_2_coupling_round_trip() {
    let trained = &desk().pairs[0];
    let c = Criterion::begin("2 (coupling round trip)");

    let mut random_model = TransportModel::new(riesz_pair(), LATENT_DIM, 901);
    random_model.randomize_params(&mut SeedRng::new(902));
    assert_round_trip_bitwise(&random_model, 10_000, 903);
    assert_round_trip_bitwise(trained, 10_000, 904);

    assert!(c.elapsed() < Duration::from_secs(5), "over budget: {:?}", c.elapsed());
    c.pass();
}

/// Criterion 3: with the max/min mirrored pair, the induced latent
/// operations satisfy all eight laws exactly (max absolute difference 0),
/// whatever the coupling parameters are.
#[test]
fn criterion_3_induced_laws_hold_exactly() {
    let c = Criterion::begin("3 (induced laws exact)");
    let catalog = LawCatalog::standard();

    for model_seed in [31u64, 32] {
        let mut model = TransportModel::new(riesz_pair(), LATENT_DIM, 7000 + model_seed);
        model.randomize_params(&mut SeedRng::new(model_seed));
        let mut rng = SeedRng::new(40 + model_seed);
        for tuple in 0..100 {
            let latents: Vec<LatentVector> =
                (0..3).map(|_| random_latent(LATENT_DIM, &mut rng)).collect();
            for law in catalog.laws() {
                let lhs = predict_latent(&model, &law.lhs, &latents).expect("bound");
                let rhs = predict_latent(&model, &law.rhs, &latents).expect("bound");
                let max_diff = lhs
                    .iter()
                    .zip(rhs.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                assert_eq!(
                    max_diff, 0.0,
                    "{} violated on tuple {tuple} under parameter seed {model_seed}",
                    law.name
                );
            }
        }
    }

    assert!(c.elapsed() < Duration::from_secs(10), "over budget: {:?}", c.elapsed());
    c.pass();
}

/// Criterion 4: the trained max/min coupling is perfectly self-consistent:
/// every defined IoU between a term's prediction and any J-step rewrite's
/// prediction is exactly 1.0, for 100 terms and J from 1 to 8.
#[test]
fn criterion_4_rewrite_self_consistency() {
    let desk = desk();
    let c = Criterion::begin("4 (rewrite self-consistency)");

    let cfg = EvalConfig { num_points: 2048, num_terms: 100, ell_max: 10, j_max: 8 };
    let report =
        eval_consistency(&desk.pairs[0], &desk.embed, &desk.dataset, &desk.latents, &cfg, EVAL_SEED);

    let per_term: Vec<f64> =
        report.select("consistency", "iou").map(|r| r.value).collect();
    assert!(!per_term.is_empty(), "no defined IoU datapoints");
    assert!(
        per_term.iter().all(|&v| v == 1.0),
        "worst IoU {}",
        per_term.iter().cloned().fold(f64::INFINITY, f64::min)
    );
    for metric in ["iou_median", "iou_p20", "iou_p80"] {
        for row in report.select("consistency", metric) {
            assert_eq!(row.value, 1.0, "{metric} at J={}", row.ell_or_j);
            assert!(row.n > 0);
        }
    }

    assert!(c.elapsed() < Duration::from_secs(120), "over budget: {:?}", c.elapsed());
    c.pass();
}

/// Criterion 5: on the desk-scale run, more lattice laws buy more
/// transported-term quality. The max/min coupling's mean test IoU is at
/// least every weaker pair's (3 laws or fewer), and the rank correlation
/// between law count and mean IoU across the five pairs is at least 0.5.
/// Both baselines are evaluated alongside under the same random numbers.
#[test]
fn criterion_5_law_count_tracks_performance() {
    let desk = desk();
    let c = Criterion::begin("5 (law count tracks performance)");
    let cfg = EvalConfig::default();

    let mut law_counts = Vec::new();
    let mut means = Vec::new();
    for (model, &(meet, join, expected_laws)) in desk.pairs.iter().zip(&DESK_PAIRS) {
        assert_eq!(model.law_count(), expected_laws, "({}, {})", meet.id(), join.id());
        let m = overall_mean(desk, &cfg, model);
        println!(
            "  pair ({}, {}): {} laws, mean IoU {:.4}",
            meet.id(),
            join.id(),
            expected_laws,
            m
        );
        law_counts.push(expected_laws as f64);
        means.push(m);
    }
    for model in &desk.baselines {
        let m = overall_mean(desk, &cfg, model);
        println!("  baseline {}: mean IoU {:.4}", model.kind().id(), m);
    }

    let riesz_mean = means[0];
    for (i, &(meet, join, laws)) in DESK_PAIRS.iter().enumerate() {
        if laws <= 3 {
            assert!(
                riesz_mean >= means[i],
                "max/min ({riesz_mean:.4}) below ({}, {}) with {laws} laws ({:.4})",
                meet.id(),
                join.id(),
                means[i]
            );
        }
    }
    let rho = spearman(&law_counts, &means);
    println!("  law-count/IoU rank correlation: {rho:.3}");
    assert!(rho >= 0.5, "rank correlation {rho:.3} below 0.5");

    c.pass();
}

/// Overall mean test IoU of one model on the shared evaluation draw.
fn overall_mean<M: LatentOps + Sync>(desk: &Desk, cfg: &EvalConfig, model: &M) -> f64 {
    let report =
        eval_performance(model, &desk.embed, &desk.dataset, &desk.latents, cfg, EVAL_SEED);
    let rows: Vec<_> = report
        .select("performance", "iou_mean")
        .filter(|r| r.ell_or_j == 0)
        .collect();
    assert_eq!(rows.len(), 1, "expected one overall mean for {}", model.model_id());
    assert!(rows[0].n > 0);
    rows[0].value
}

/// Criterion 6: the pooled baseline is bitwise symmetric in its arguments;
/// the concat baseline is not (a witness pair exists).
#[test]
fn criterion_6_baseline_symmetry() {
    let desk = desk();
    let c = Criterion::begin("6 (baseline symmetry)");
    let symbols = [OperationSymbol::meet(), OperationSymbol::join()];

    let fresh = DirectBaseline::new(BaselineKind::Symmetric, LATENT_DIM, 601);
    let trained = &desk.baselines[1];
    assert_eq!(trained.kind(), BaselineKind::Symmetric);
    let mut rng = SeedRng::new(602);
    for _ in 0..1000 {
        let z1 = random_latent(LATENT_DIM, &mut rng);
        let z2 = random_latent(LATENT_DIM, &mut rng);
        for model in [&fresh, trained] {
            for sym in &symbols {
                let ab = model.baseline_apply(sym, &z1, &z2);
                let ba = model.baseline_apply(sym, &z2, &z1);
                for (a, b) in ab.iter().zip(ba.iter()) {
                    assert_eq!(a.to_bits(), b.to_bits(), "argument swap changed output");
                }
            }
        }
    }

    let concat = DirectBaseline::new(BaselineKind::MlpConcat, LATENT_DIM, 603);
    let mut rng = SeedRng::new(604);
    let mut witness = false;
    for _ in 0..1000 {
        let z1 = random_latent(LATENT_DIM, &mut rng);
        let z2 = random_latent(LATENT_DIM, &mut rng);
        let ab = concat.baseline_apply(&symbols[0], &z1, &z2);
        let ba = concat.baseline_apply(&symbols[0], &z2, &z1);
        if ab.iter().zip(ba.iter()).any(|(a, b)| a.to_bits() != b.to_bits()) {
            witness = true;
            break;
        }
    }
    assert!(witness, "concat baseline behaved symmetrically on 1000 random pairs");

    assert!(c.elapsed() < Duration::from_secs(5), "over budget: {:?}", c.elapsed());
    c.pass();
}

fn assert_binary_lattice_shape(term: &Term) {
    match term {
        Term::Variable(i) => assert!(*i >= 1),
        Term::Apply(sym, children) => {
            assert!(sym.is_meet() || sym.is_join());
            assert_eq!(children.len(), 2);
            for child in children {
                assert_binary_lattice_shape(child);
            }
        }
    }
}

/// Criterion 7: the oracle suite. (a) rewrites preserve set semantics
/// grid-exactly; (b) every training loss passes a finite-difference
/// gradient check; (c) the Monte Carlo IoU estimator recovers a known
/// analytic value; (d) random terms always have the promised shape.
#[test]
fn criterion_7_oracle_suite() {
    let c = Criterion::begin("7 (oracle suite)");

    // (a) equivalent_term preserves semantics, checked cell for cell on
    // rasterized grids.
    let mut rng = SeedRng::new(801);
    for i in 0..1000 {
        let ell = rng.uniform_inclusive(1, 6);
        let term = random_term(ell, &mut rng);
        let grids: Vec<_> =
            (0..ell).map(|_| rasterize(&sample_set_spec(&mut rng), 16)).collect();
        let j = rng.uniform_inclusive(1, 8);
        let rewritten = equivalent_term(&term, j, &mut rng);
        let before = realize_term_on_grids(&term, &grids).expect("bound");
        let after = realize_term_on_grids(&rewritten, &grids).expect("bound");
        assert_eq!(before, after, "rewrite {i} changed semantics (J={j})");
    }

    // (b) gradient checks on the reconstruction, coupling, and baseline
    // losses, each against central differences.
    let dataset = gen_dataset(20, 8, 71);
    let embed = EmbedModel::new(EmbedArch::desk(8, 8), 72);
    let latents = embed.encode_dataset(&dataset);
    let rec = reconstruction_grad_check(&dataset, 8, 40, 73);
    assert!(rec < 1e-4, "reconstruction loss gradient check: {rec}");
    let tra = transport_grad_check(&embed, &dataset, &latents, riesz_pair(), 40, 74);
    assert!(tra < 1e-4, "coupling loss gradient check: {tra}");
    for kind in [BaselineKind::MlpConcat, BaselineKind::Symmetric] {
        let bas = baseline_grad_check(&embed, &dataset, &latents, kind, 40, 75);
        assert!(bas < 1e-4, "{} loss gradient check: {bas}", kind.id());
    }

    // (c) the Monte Carlo IoU of a half square against the full square is
    // 0.5 up to sampling error at 10^4 points.
    let mut rng = SeedRng::new(802);
    let mut pred = Vec::with_capacity(10_000);
    for _ in 0..10_000 {
        let x = rng.uniform_range(-1.0, 1.0);
        let _y = rng.uniform_range(-1.0, 1.0);
        pred.push(x < 0.0);
    }
    let truth = vec![true; pred.len()];
    let estimate = iou(&pred, &truth).expect("union nonempty");
    assert!((estimate - 0.5).abs() < 0.02, "half-square IoU estimate {estimate}");

    // (d) random terms use every variable exactly once, have one fewer
    // binary meet/join node than leaves, and print/parse losslessly.
    let mut rng = SeedRng::new(803);
    for _ in 0..10_000 {
        let ell = rng.uniform_inclusive(1, 10);
        let term = random_term(ell, &mut rng);
        assert_eq!(term.leaf_count(), ell);
        assert_eq!(term.apply_count(), ell - 1);
        assert_eq!(term.variables(), (1..=ell).collect::<Vec<_>>());
        assert_binary_lattice_shape(&term);
        let reparsed = parse_term(&term.to_string()).expect("printer output parses");
        assert_eq!(reparsed, term);
    }

    assert!(c.elapsed() < Duration::from_secs(300), "over budget: {:?}", c.elapsed());
    c.pass();
}
