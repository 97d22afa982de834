//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{exp_by_compositions, rand_field, rand_rational, rand_series};
use fpgroup::bpcheck::{independence_search, separation_check};
use fpgroup::embed::{
    certify_all, nontrivial_certificate, reduced_words, surface_group_of_genus, surface_relator,
    Certificate, Chain, Mode, Partner, Verdict, Word,
};
use fpgroup::field::{FieldElem, Monomial};
use fpgroup::liealg::{exp, exp_formula, exp_picard, flow, log, proportional, VectorField};
use fpgroup::series::Series;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn free_pair(n: usize) -> Chain {
    Chain::one_param_base(n, &VectorField::basis(n, 1), "X")
        .unwrap()
        .free_product_step(&[Partner::new("Y", Word::gen("X"))])
        .unwrap()
}

fn words_up_to(gens: &[&str], len: usize) -> Vec<Word> {
    (1..=len).flat_map(|l| reduced_words(gens, l)).collect()
}

fn group_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 12;
    let id = Series::identity(n);
    for k in 0..500 {
        let (f, g, h) = (
            rand_series(&mut rng, n),
            rand_series(&mut rng, n),
            rand_series(&mut rng, n),
        );
        let lhs = f.compose(&g).unwrap().compose(&h).unwrap();
        let rhs = f.compose(&g.compose(&h).unwrap()).unwrap();
        ensure!(lhs == rhs, "associativity fails on triple {k}");
        let fi = f.inverse().unwrap();
        ensure!(
            f.compose(&fi).unwrap().is_identity(),
            "right inverse fails on triple {k}"
        );
        ensure!(
            fi.compose(&f).unwrap().is_identity(),
            "left inverse fails on triple {k}"
        );
        ensure!(
            f.compose(&id).unwrap() == f && id.compose(&f).unwrap() == f,
            "unit law fails on triple {k}"
        );
    }
    Ok("500 triples at N=12, exact".into())
}

fn two_symbol_field<R: Rng>(rng: &mut R, n: usize) -> VectorField {
    let coeffs = (0..n)
        .map(|_| {
            FieldElem::from_terms((0..rng.gen_range(0..=2)).map(|_| {
                let m =
                    Monomial::from_pairs([(0, rng.gen_range(0..=2)), (1, rng.gen_range(0..=2))]);
                (m, rand_rational(rng))
            }))
        })
        .collect();
    VectorField::from_coeffs(coeffs).unwrap()
}

fn exp_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..100 {
        let a = rand_field(&mut rng, 10);
        let f = exp_formula(&a).unwrap();
        ensure!(
            f == exp_picard(&a).unwrap(),
            "rational field {k}: formula differs from Picard"
        );
        ensure!(
            f.coeffs() == exp_by_compositions(&a).as_slice(),
            "rational field {k}: formula differs from enumeration"
        );
    }
    for k in 0..25 {
        let a = two_symbol_field(&mut rng, 8);
        let f = exp_formula(&a).unwrap();
        ensure!(
            f == exp_picard(&a).unwrap(),
            "symbolic field {k}: formula differs from Picard"
        );
    }
    Ok("100 rational fields at N=10, 25 two-symbol fields at N=8".into())
}

fn exp_log_roundtrips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..200 {
        let a = rand_field(&mut rng, 16);
        ensure!(
            log(&exp(&a).unwrap()).unwrap() == a,
            "log(exp(a)) != a for field {k}"
        );
        let h = rand_series(&mut rng, 16);
        ensure!(
            exp(&log(&h).unwrap()).unwrap() == h,
            "exp(log(h)) != h for series {k}"
        );
    }
    ensure!(
        log(&Series::identity(16)).unwrap().is_zero(),
        "log(identity) != 0"
    );
    ensure!(
        exp(&VectorField::zero(16)).unwrap().is_identity(),
        "exp(0) != identity"
    );
    Ok("200 fields and 200 series at N=16".into())
}

fn mobius_flow() -> Outcome {
    let n = 12;
    let lambda = FieldElem::symbol(0);
    let h = flow(&exp(&VectorField::basis(n, 1)).unwrap(), &lambda).unwrap();
    let expected: Vec<FieldElem> = (1..=n as u32).map(|i| lambda.pow(i)).collect();
    ensure!(
        h.coeffs() == expected.as_slice(),
        "flow coefficients differ: {h}"
    );
    Ok("flow(exp(e1), s0) = [s0, s0^2, ..., s0^12]".into())
}

fn field_with_ord<R: Rng>(rng: &mut R, n: usize) -> VectorField {
    let o = rng.gen_range(1..=3);
    let mut cs: Vec<FieldElem> = rand_field(rng, n).coeffs().to_vec();
    for c in cs.iter_mut().take(o - 1) {
        *c = FieldElem::zero();
    }
    let mut lead = rand_rational(rng);
    while lead == fpgroup::field::integer(0) {
        lead = rand_rational(rng);
    }
    cs[o - 1] = FieldElem::constant(lead);
    VectorField::from_coeffs(cs).unwrap()
}

fn commutation_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 16;
    for k in 0..100 {
        let a = rand_field(&mut rng, n);
        let b = a.scale(&FieldElem::constant(rand_rational(&mut rng)));
        let c = exp(&a).unwrap().commutator(&exp(&b).unwrap()).unwrap();
        ensure!(c.is_identity(), "proportional pair {k} does not commute");
    }
    let mut done = 0;
    while done < 100 {
        let a = field_with_ord(&mut rng, n);
        let b = field_with_ord(&mut rng, n);
        if proportional(&b, &a).unwrap().is_some() {
            continue;
        }
        let c = exp(&a).unwrap().commutator(&exp(&b).unwrap()).unwrap();
        ensure!(
            !c.is_identity(),
            "non-proportional pair {done} commutes at N=16"
        );
        done += 1;
    }
    Ok("100 proportional pairs commute, 100 non-proportional pairs do not, N=16".into())
}

fn tally(certs: &[Certificate]) -> (usize, usize, usize) {
    let nontrivial = certs.iter().filter(|c| c.is_nontrivial()).count();
    let max_order = certs.iter().map(|c| c.order_used).max().unwrap_or(0);
    let max_index = certs
        .iter()
        .filter_map(|c| c.witness_index)
        .max()
        .unwrap_or(0);
    (nontrivial, max_order, max_index)
}

fn certify_words(
    chain: &Chain,
    words: &[Word],
    order_max: usize,
    mode: Mode,
    seed: u64,
) -> Result<Vec<Certificate>, String> {
    certify_all(chain, words, order_max, mode, seed)
        .into_iter()
        .zip(words)
        .map(|(r, w)| r.map_err(|e| format!("{w}: {e}")))
        .collect()
}

fn free_embedding() -> Outcome {
    let chain = free_pair(16);
    let words = words_up_to(&["X", "Y"], 6);
    ensure!(
        words.len() == 1456,
        "expected 1456 reduced words, got {}",
        words.len()
    );
    ensure!(
        words.iter().filter(|w| w.length() == 6).count() == 972,
        "expected 972 words of length 6"
    );
    let certs = certify_words(&chain, &words, 32, Mode::Sampled, 6)?;
    let (ok, max_order, max_index) = tally(&certs);
    if let Some(c) = certs.iter().find(|c| !c.is_nontrivial()) {
        return Err(format!("{}: {c}", c.word));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let spot: Vec<Word> = words.choose_multiple(&mut rng, 20).cloned().collect();
    let sym = certify_words(&chain, &spot, 32, Mode::Symbolic, 0)?;
    if let Some(c) = sym.iter().find(|c| !c.is_nontrivial()) {
        return Err(format!("symbolic spot check {}: {c}", c.word));
    }
    Ok(format!(
        "{ok}/1456 sampled Nontrivial (max order used {max_order}, max witness index {max_index}), 20/20 symbolic"
    ))
}

fn surface_genus_two() -> Outcome {
    let chain = surface_group_of_genus(2, 16).map_err(|e| e.to_string())?;
    let relator = surface_relator(1);
    ensure!(
        relator == Word::parse("[A,B][B',A']").unwrap(),
        "unexpected relator {relator}"
    );
    ensure!(
        chain.eval_word(&relator).unwrap().is_identity(),
        "relator is not the identity at N=16"
    );
    for text in ["[A,B]", "[A,A']", "[B,B']"] {
        let w = Word::parse(text).unwrap();
        let c =
            nontrivial_certificate(&chain, &w, 16, Mode::Symbolic, 0).map_err(|e| e.to_string())?;
        ensure!(c.is_nontrivial(), "{text}: {c}");
    }
    let words = words_up_to(&["A", "B"], 6);
    let certs = certify_words(&chain, &words, 48, Mode::Sampled, 7)?;
    let (ok, max_order, max_index) = tally(&certs);
    if let Some(c) = certs.iter().find(|c| c.verdict == Verdict::Inconclusive) {
        return Err(format!("{}: {c}", c.word));
    }
    Ok(format!(
        "relator = identity at N=16; 3 commutators Nontrivial; {ok}/{} words in A, B Nontrivial (max order used {max_order}, max witness index {max_index})",
        words.len()
    ))
}

fn centralizer_extension() -> Outcome {
    let n = 16;
    let chain = free_pair(n)
        .centralizer_extension_step(&Word::parse("X Y").unwrap(), "T")
        .map_err(|e| e.to_string())?;
    let t = chain.generator("T").unwrap().clone();
    let u = chain.eval_word(&Word::parse("X Y").unwrap()).unwrap();
    for m in -5..=5 {
        ensure!(
            t.commutator(&u.power(m).unwrap()).unwrap().is_identity(),
            "[T, U^{m}] != 1"
        );
    }
    let lambda = FieldElem::symbol(chain.registry().next_id());
    ensure!(
        t.commutator(&flow(&u, &lambda).unwrap())
            .unwrap()
            .is_identity(),
        "[T, U^lambda] != 1"
    );
    let s = chain.steps().last().unwrap().symbols()[0];
    ensure!(
        t.coeffs().iter().any(|c| c.degree_in(s) > 0),
        "T does not involve its fresh symbol"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pool = words_up_to(&["X", "Y"], 3);
    let mut tested = 0;
    let mut words = Vec::new();
    while words.len() < 40 {
        let g1 = pool.choose(&mut rng).unwrap().clone();
        let g2 = pool.choose(&mut rng).unwrap().clone();
        let hyp = Word::commutator(
            &g2.inverse().concat(&Word::gen("T")).concat(&g2),
            &Word::gen("T"),
        );
        let h =
            nontrivial_certificate(&chain, &hyp, n, Mode::Sampled, 8).map_err(|e| e.to_string())?;
        tested += 1;
        if !h.is_nontrivial() {
            continue;
        }
        let (b1, b2) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let w = g1
            .concat(&Word::gen("T").pow(b1))
            .concat(&g2)
            .concat(&Word::gen("T").pow(b2));
        words.push(w);
    }
    let certs = certify_words(&chain, &words, 32, Mode::Sampled, 9)?;
    if let Some(c) = certs.iter().find(|c| !c.is_nontrivial()) {
        return Err(format!("{}: {c}", c.word));
    }
    Ok(format!(
        "[T, U^m] = 1 for |m| <= 5 and symbolic m; 40/40 words g1 T^b1 g2 T^b2 Nontrivial ({tested} hypotheses drawn)"
    ))
}

fn bp_evidence() -> Outcome {
    let chain = free_pair(16);
    let x = chain.generator("X").unwrap().clone();
    let y = chain.generator("Y").unwrap().clone();
    let r = independence_search(&[x.clone(), y.clone()], 3, 9, None).map_err(|e| e.to_string())?;
    ensure!(
        r.witness_n == Some(1),
        "independence witness {:?}",
        r.witness_n
    );
    ensure!(
        r.entries.len() == 100,
        "window has {} products",
        r.entries.len()
    );
    ensure!(
        r.entries.iter().all(|e| e.witness_index.is_some()),
        "trivial product in the window"
    );
    let s = separation_check(&[x.clone(), y.clone()], &[y.clone(), x, y], 2, 5, None)
        .map_err(|e| e.to_string())?;
    ensure!(s.witness_n.is_some(), "no separation witness up to n = 2");
    ensure!(
        s.entries.iter().all(|e| e.witness_index.is_some()),
        "trivial interleaved product"
    );
    Ok(format!(
        "independence witness n=1 over 100 products; separation witness n={} over {} products (order {})",
        s.witness_n.unwrap(),
        s.entries.len(),
        s.order_used
    ))
}

fn replay_determinism() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let file = dir.path().join("genus2.json");
    let chain = surface_group_of_genus(2, 16).map_err(|e| e.to_string())?;
    std::fs::write(&file, chain.to_json()).map_err(|e| e.to_string())?;
    let original = std::fs::read(&file).map_err(|e| e.to_string())?;
    let loaded =
        Chain::from_json(std::str::from_utf8(&original).unwrap()).map_err(|e| e.to_string())?;
    drop(chain);
    std::fs::remove_file(&file).map_err(|e| e.to_string())?;
    let replayed = loaded.replay().map_err(|e| e.to_string())?;
    std::fs::write(&file, replayed.to_json()).map_err(|e| e.to_string())?;
    let again = std::fs::read(&file).map_err(|e| e.to_string())?;
    ensure!(again == original, "replayed chain file differs");
    Ok(format!("{} bytes reproduced exactly", original.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("group axioms", group_axioms),
        ("exp oracle equivalence", exp_oracles),
        ("exp/log roundtrips", exp_log_roundtrips),
        ("Mobius flow closed form", mobius_flow),
        ("commutation of proportional fields", commutation_lemma),
        ("free product embedding", free_embedding),
        ("genus-2 surface group", surface_genus_two),
        ("centralizer extension", centralizer_extension),
        ("big powers window evidence", bp_evidence),
        ("replay determinism", replay_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
