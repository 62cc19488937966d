//! Acceptance criteria 1-11. Each test prints one PASS/FAIL line (written
//! straight to stdout so it shows without `--nocapture`) and then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use momentwave::charsys::reduced_matrix;
use momentwave::cli::{cross_generator_cases, positive_definite_suite, tensor_suite};
use momentwave::combinatorics::{int, rational, Rational};
use momentwave::kinetic::{verify_hankel, verify_oracle_match, Adjudication, StateParams};
use momentwave::poly::RationalPoly;
use momentwave::solver::{block_speeds, char_poly, model_speeds, real_roots, verify_independence, ExactForm, SpeedSet};
use momentwave::subluminal::verify_sublum;
use momentwave::tensor::{verify_theorem1, verify_theorem2, FrameProjectors};
use num_traits::Signed;

fn verdict(id: u32, title: &str, ok: bool, elapsed: Duration, budget_s: f64, detail: &str) {
    let in_time = elapsed.as_secs_f64() < budget_s;
    let pass = ok && in_time;
    let line = format!(
        "criterion {id:>2} {}: {title} [{:.3}s of {budget_s}s] {detail}\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} over its time budget");
}

/// `-√q, +√q` in the solver's canonical form (rational when `q` is a square).
fn sqrt_pair(q: Rational) -> [(ExactForm, usize); 2] {
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    if &n * &n == *q.numer() && &d * &d == *q.denom() {
        let r = Rational::new(n, d);
        return [(ExactForm::Rational(-r.clone()), 1), (ExactForm::Rational(r), 1)];
    }
    [(ExactForm::Sqrt { sign: -1, q: q.clone() }, 1), (ExactForm::Sqrt { sign: 1, q }, 1)]
}

fn forms(set: &SpeedSet) -> Vec<(ExactForm, usize)> {
    set.roots.iter().map(|r| (r.exact.clone(), r.multiplicity)).collect()
}

fn show(set: &SpeedSet) -> String {
    let parts: Vec<String> = set.roots.iter().map(|r| format!("{}×{}", r.exact, r.multiplicity)).collect();
    format!("{{{}}}", parts.join(", "))
}

#[test]
fn criterion_01_top_block() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=6 {
        let s = block_speeds(n, n).unwrap();
        if forms(&s) != vec![(ExactForm::Rational(int(0)), 1)] {
            bad.push(format!("N={n}: {}", show(&s)));
        }
    }
    let detail = if bad.is_empty() { "block p=N is {0} for N=1..6".to_string() } else { bad.join("; ") };
    verdict(1, "p=N block", bad.is_empty(), start.elapsed(), 1.0, &detail);
}

#[test]
fn criterion_02_eta1_law() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for p in 0..=8usize {
        let f = char_poly(&reduced_matrix(p, 1).unwrap(), &int(1));
        let want = RationalPoly::from_ints(&[-1, 0, 2 * p as i64 + 3]);
        let roots: Vec<ExactForm> = real_roots(&f, 1e-12).unwrap().into_iter().map(|r| r.exact).collect();
        let q = rational(1, 2 * p as i64 + 3);
        let expected: Vec<ExactForm> = sqrt_pair(q).into_iter().map(|x| x.0).collect();
        if f.primitive_part() != want || roots != expected {
            bad.push(format!("p={p}: {f}"));
        }
    }
    let detail = if bad.is_empty() { "roots ±√(1/(2p+3)) for p=0..8".to_string() } else { bad.join("; ") };
    verdict(2, "η=1 law", bad.is_empty(), start.elapsed(), 1.0, &detail);
}

#[test]
fn criterion_03_second_block_from_top() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=6usize {
        let s = block_speeds(n - 2, n).unwrap();
        let d = 2 * n as i64 - 1;
        let [m3, p3] = sqrt_pair(rational(3, d));
        let [m1, p1] = sqrt_pair(rational(1, d));
        let expected = vec![m3, m1, (ExactForm::Rational(int(0)), 2), p1, p3];
        if forms(&s) != expected {
            bad.push(format!("N={n}: got {}", show(&s)));
        }
    }
    let detail = if bad.is_empty() {
        "{0×2, ±√(1/(2N-1)), ±√(3/(2N-1))} for N=2..6".to_string()
    } else {
        format!("expected {{0×2, ±√(1/(2N-1)), ±√(3/(2N-1))}}; {}", bad.join("; "))
    };
    verdict(3, "p=N-2 block", bad.is_empty(), start.elapsed(), 5.0, &detail);
}

#[test]
fn criterion_04_second_order_model() {
    let start = Instant::now();
    let model = model_speeds(2).unwrap();
    let zero = (ExactForm::Rational(int(0)), 6);
    let has = |f: &ExactForm| model.roots.iter().any(|r| &r.exact == f);
    let count_ok = model.total() == 14;
    let zeros_ok = forms(&model).contains(&zero);
    let ones_ok = has(&ExactForm::Rational(int(1))) && has(&ExactForm::Rational(int(-1)));
    let oracle = verify_oracle_match(2, &StateParams::default(), 1e-9).unwrap();
    let pair = block_speeds(1, 2).unwrap();
    let in_pair = |forms: [(ExactForm, usize); 2]| forms.iter().all(|(f, _)| pair.roots.iter().any(|r| &r.exact == f));
    let inverse_sqrt = in_pair(sqrt_pair(rational(1, 5)));
    let inverse = in_pair(sqrt_pair(rational(1, 25)));
    let claim = match (oracle.adjudication, inverse_sqrt, inverse) {
        (Adjudication::InverseSqrt, true, _) => "p=1 pair ±1/√5 confirmed by the oracle",
        (Adjudication::Inverse, _, true) => "p=1 pair ±1/5 confirmed by the oracle",
        _ => "p=1 pair not confirmed",
    };
    let pair_ok = oracle.pass() && claim.ends_with("by the oracle");
    let ok = count_ok && zeros_ok && ones_ok && pair_ok;
    let detail = format!(
        "total={} zeros×6={zeros_ok} ±1 present={ones_ok} oracle max|diff|={:.1e}; {claim}; model={}",
        model.total(),
        oracle.max_abs_diff,
        show(&model)
    );
    verdict(4, "N=2 full model", ok, start.elapsed(), 30.0, &detail);
}

#[test]
fn criterion_05_closure_independence() {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [2, 3] {
        let r = verify_independence(n, 50, 7).unwrap();
        let failed = r.trials.iter().filter(|t| !t.pass()).count();
        ok &= r.pass() && r.trials.len() == 50;
        detail.push(format!("N={n}: {failed}/50 trials differ"));
    }
    verdict(5, "closure independence", ok, start.elapsed(), 120.0, &detail.join("; "));
}

#[test]
fn criterion_06_oracle_equivalence() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 0..=4 {
        let r = verify_oracle_match(n, &StateParams::default(), 1e-8).unwrap();
        ok &= r.pass();
        detail.push(format!("N={n}: {:.1e}", r.max_abs_diff));
    }
    let r1 = verify_oracle_match(1, &StateParams::default(), 1e-10).unwrap();
    let anchor = 1.0 / 3f64.sqrt();
    let nonzero: Vec<f64> = r1.oracle.eigenvalues.iter().map(|e| e.to_f64()).filter(|e| e.abs() > 1e-6).collect();
    let anchor_ok = nonzero.len() == 2 && nonzero.iter().all(|e| (e.abs() - anchor).abs() < 1e-10) && nonzero[0] * nonzero[1] < 0.0;
    ok &= anchor_ok;
    detail.push(format!("N=1 pair ±√(1/3): {anchor_ok}"));
    verdict(6, "4D oracle equivalence", ok, start.elapsed(), 120.0, &detail.join("; "));
}

#[test]
fn criterion_07_tensor_identities() {
    let start = Instant::now();
    let frames = [FrameProjectors::canonical(), FrameProjectors::boosted()];
    let mut bad = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        for p in 2..=6 {
            if !verify_theorem1(f, p) {
                bad.push(format!("theorem 1 p={p} frame {i}"));
            }
        }
        for r in 1..=4 {
            if !verify_theorem2(f, r) {
                bad.push(format!("theorem 2 r={r} frame {i}"));
            }
        }
    }
    let (_, t3, stable) = tensor_suite(0, true).unwrap();
    let holds = t3.iter().filter(|x| x.1.pass).count();
    let ok = bad.is_empty() && stable;
    let detail = format!(
        "failures: [{}]; theorem 3 holds in {holds}/{} cases, stable across frames: {stable}",
        bad.join(", "),
        t3.len()
    );
    verdict(7, "tensor identities", ok, start.elapsed(), 120.0, &detail);
}

#[test]
fn criterion_08_hankel() {
    let start = Instant::now();
    let r = verify_hankel(8, 6);
    let pd = positive_definite_suite(10, 11).unwrap();
    let pd_fail = pd.iter().filter(|x| !x.2).count();
    let ok = r.pass() && pd_fail == 0 && r.cases.len() == 9 * 7;
    let detail = format!("{} determinants, {} prefactor failures, {pd_fail}/{} non-PD", r.cases.len(), r.prefactor_failures.len(), pd.len());
    verdict(8, "Hankel identities", ok, start.elapsed(), 10.0, &detail);
}

#[test]
fn criterion_09_subluminality() {
    let start = Instant::now();
    let r = verify_sublum(1000, 2024, 1e-12, 5.0, 6).unwrap();
    let detail = format!(
        "max discriminant gap {:.1e}, max |λ| {:.15}, {} failures",
        r.max_discriminant_gap,
        r.max_abs_root,
        r.failures.len()
    );
    verdict(9, "subluminality", r.pass() && r.samples == 1000, start.elapsed(), 5.0, &detail);
}

#[test]
fn criterion_10_cross_generator() {
    let start = Instant::now();
    let cases = cross_generator_cases(5).unwrap();
    let bad = cases.iter().filter(|c| !c.5).count();
    let detail = format!("{} (p,m,a,b,n) combinations, {bad} mismatches", cases.len());
    verdict(10, "cross-generator equality", bad == 0, start.elapsed(), 30.0, &detail);
}

#[test]
fn criterion_11_light_cone() {
    let start = Instant::now();
    let one = int(1);
    let mut worst = 0f64;
    let mut bad = Vec::new();
    for n in 0..=6 {
        for p in 0..=n {
            let s = block_speeds(p, n).unwrap();
            for r in &s.roots {
                let inside = match &r.exact {
                    ExactForm::Rational(q) => q.abs() <= one,
                    ExactForm::Sqrt { q, .. } => q <= &one,
                    ExactForm::Interval { .. } => r.to_f64().abs() <= 1.0 + 1e-12,
                };
                worst = worst.max(r.to_f64().abs());
                if !inside {
                    bad.push(format!("N={n} p={p}: {}", r.exact));
                }
            }
        }
    }
    let detail = format!("max |λ| over N≤6 = {worst:.15}; violations: [{}]", bad.join(", "));
    verdict(11, "light-speed bound", bad.is_empty(), start.elapsed(), 60.0, &detail);
}
