use num_bigint::BigInt;
use prax::distributions::{DirichletParams, RandomSource};
use prax::domains::{CnfFormula, DiophantineEq, Element, FamilyKind, Nfa, SubsetSpec, SymmetricDifference, TwoDAutomaton};
use prax::engine::{PraxConfig, Problem};
use prax::oracle::{
    all_grids, assignment_of, cnf_truth_table, dioph_eval_i128, dioph_eval_reordered, exact_mass, first_row_all,
    nfa_accepts_by_runs, twod_accepts_dfs, twod_deterministic_run, EnumerationBudget, ProductDfa, ReferencePmf,
};
use prax::ParseErrorKind;

fn random_nfa(src: &mut RandomSource, states: usize) -> Nfa {
    let mut text = String::from("alphabet a b\n");
    text.push_str(&format!("states {}\n", (0..states).map(|q| format!("q{q}")).collect::<Vec<_>>().join(" ")));
    let mut starts = vec!["q0".to_string()];
    if src.uniform() < 0.3 {
        starts.push(format!("q{}", src.below(states as u32)));
    }
    text.push_str(&format!("start {}\n", starts.join(" ")));
    let finals: Vec<String> = (0..states).filter(|_| src.uniform() < 0.4).map(|q| format!("q{q}")).collect();
    if !finals.is_empty() {
        text.push_str(&format!("final {}\n", finals.join(" ")));
    }
    for p in 0..states {
        for a in ["a", "b"] {
            for q in 0..states {
                if src.uniform() < 0.3 {
                    text.push_str(&format!("trans q{p} {a} q{q}\n"));
                }
            }
        }
    }
    Nfa::parse(&text).unwrap()
}

fn binary_words(max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for len in 1..=max_len {
        for code in 0..1u32 << len {
            out.push((0..len).map(|i| code >> i & 1).collect());
        }
    }
    out
}

#[test]
fn nfa_simulation_matches_run_enumeration() {
    let mut src = RandomSource::new(11);
    let words = binary_words(6);
    for _ in 0..50 {
        let a = random_nfa(&mut src, 5);
        for w in &words {
            assert_eq!(a.accepts(w).unwrap(), nfa_accepts_by_runs(&a, w), "{a}\n{w:?}");
        }
    }
}

#[test]
fn symmetric_difference_matches_product_automaton() {
    let mut src = RandomSource::new(12);
    let words = binary_words(6);
    for _ in 0..30 {
        let m = random_nfa(&mut src, 4);
        let n = random_nfa(&mut src, 4);
        let product = ProductDfa::symmetric_difference(&m, &n).unwrap();
        let diff = SymmetricDifference::new(m, n).unwrap();
        for w in &words {
            assert_eq!(diff.contains(w).unwrap(), product.accepts(w));
        }
    }
}

#[test]
fn equal_automata_have_empty_difference() {
    let mut src = RandomSource::new(13);
    let params = DirichletParams::new(2.0, 0).unwrap();
    for seed in 0..20 {
        let a = random_nfa(&mut src, 5);
        let spec = SubsetSpec::SymmetricDifference(SymmetricDifference::new(a.clone(), a).unwrap());
        let config = PraxConfig::new(0.1, seed).unwrap();
        let d = spec.decide(&mut config.source(), FamilyKind::Word1D, Problem::Emptiness, &params, &config).unwrap();
        assert!(d.verdict.answer);
    }
}

#[test]
fn a_star_versus_everything() {
    // the difference is the words containing b, mass 1 - sum T(l) 2^-l
    let a_star = Nfa::parse("alphabet a b\nstart q\nfinal q\ntrans q a q\n").unwrap();
    let all = Nfa::parse("alphabet a b\nstart q\nfinal q\ntrans q a q\ntrans q b q\n").unwrap();
    let spec = SubsetSpec::SymmetricDifference(SymmetricDifference::new(a_star, all).unwrap());
    let budget = EnumerationBudget::new(12, 1 << 14).unwrap();
    let bracket = exact_mass(&spec, FamilyKind::Word1D, 2.0, 1, &budget).unwrap();
    let pmf = ReferencePmf::new(2.0, 1);
    let closed: f64 = (1..2000).map(|l| pmf.pmf(l) * (1.0 - 0.5f64.powi(l as i32))).sum();
    assert!(bracket.lower <= closed && closed <= bracket.upper + 1e-6, "{bracket:?} {closed}");
    let params = DirichletParams::new(2.0, 1).unwrap();
    let mut falses = 0;
    for seed in 0..20 {
        let config = PraxConfig::new(0.05, seed).unwrap();
        let d = spec.decide(&mut config.source(), FamilyKind::Word1D, Problem::Emptiness, &params, &config).unwrap();
        if let Some(Element::Word(w)) = &d.verdict.witness {
            assert!(w.contains(&1));
            falses += 1;
        }
    }
    assert_eq!(falses, 20);
}

#[test]
fn contains_a_mass_bracket() {
    let spec = SubsetSpec::Nfa(
        Nfa::parse("alphabet a b\nstart p\nfinal q\ntrans p a q\ntrans p b p\ntrans q a q\ntrans q b q\n").unwrap(),
    );
    let budget = EnumerationBudget::new(12, 1 << 14).unwrap();
    let bracket = exact_mass(&spec, FamilyKind::Word1D, 2.0, 1, &budget).unwrap();
    assert!(bracket.contains(0.646040204164162), "{bracket:?}");
    assert!(bracket.width() < 0.1);
    let too_small = EnumerationBudget::new(12, 100).unwrap();
    assert!(exact_mass(&spec, FamilyKind::Word1D, 2.0, 1, &too_small).is_err());
}

#[test]
fn empty_and_universal_brackets() {
    let empty = SubsetSpec::Nfa(Nfa::parse("alphabet a b\nstart p\n").unwrap());
    let all = SubsetSpec::Nfa(Nfa::parse("alphabet a b\nstart p\nfinal p\ntrans p a p\ntrans p b p\n").unwrap());
    let budget = EnumerationBudget::new(10, 1 << 12).unwrap();
    let e = exact_mass(&empty, FamilyKind::Word1D, 2.0, 0, &budget).unwrap();
    let u = exact_mass(&all, FamilyKind::Word1D, 2.0, 0, &budget).unwrap();
    assert_eq!(e.lower, 0.0);
    assert!(e.upper < 0.1);
    assert_eq!(u.upper, 1.0);
    assert!(u.lower > 0.9);
}

#[test]
fn cnf_matches_truth_table() {
    let mut src = RandomSource::new(21);
    for _ in 0..100 {
        let k = 1 + src.below(4) as u64;
        let clauses: Vec<Vec<i64>> = (0..1 + src.below(5))
            .map(|_| {
                (0..1 + src.below(3))
                    .map(|_| {
                        let v = 1 + src.below(k as u32) as i64;
                        if src.uniform() < 0.5 {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        let f = CnfFormula::new(k, clauses).unwrap();
        let table = cnf_truth_table(&f).unwrap();
        for (i, &expected) in table.iter().enumerate() {
            assert_eq!(f.eval(&assignment_of(i as u32, k)).unwrap(), expected, "{f}");
        }
    }
}

#[test]
fn cnf_example_and_header() {
    let f = CnfFormula::parse("p cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
    assert_eq!(f.num_vars(), 3);
    assert!(f.eval(&[true, true, false]).unwrap());
    let spec = SubsetSpec::Cnf(f);
    assert_eq!(spec.distr_parameter(), Some(3));
}

#[test]
fn uniform_assignments_are_uniform() {
    // k = 3: every outcome has frequency 1/8 within 6 sigma over 1e5 draws
    use prax::engine::{SamplableFamily, UniformAssignment};
    let mut src = RandomSource::new(4);
    let mut counts = [0u64; 8];
    let n = 100_000;
    for _ in 0..n {
        let v = UniformAssignment.sample(&mut src, 3);
        let i = v.iter().enumerate().fold(0, |acc, (j, &b)| acc | (b as usize) << j);
        counts[i] += 1;
    }
    let sigma = (n as f64 * 0.125 * 0.875).sqrt();
    for c in counts {
        assert!((c as f64 - n as f64 / 8.0).abs() <= 6.0 * sigma);
    }
    assert!(UniformAssignment.sample(&mut src, 0).is_empty());
}

const FIRST_ROW_A: &str = "alphabet a b\nstart scan\naccept ok\ntrans scan a scan R\ntrans scan # ok S\n";

#[test]
fn twod_first_row_checker_exhaustive() {
    let a = TwoDAutomaton::parse(FIRST_ROW_A).unwrap();
    for rows in 0..=3 {
        for cols in 0..=3 {
            for g in all_grids(rows, cols, 2) {
                let expected = first_row_all(&g, 0);
                assert_eq!(a.accepts(&g).unwrap(), expected, "{}", a.render_grid(&g));
                assert_eq!(twod_deterministic_run(&a, &g), Some(expected));
            }
        }
    }
}

fn random_twod(src: &mut RandomSource, deterministic: bool) -> TwoDAutomaton {
    let states = 4;
    let moves = ["U", "D", "L", "R", "S"];
    let mut text = String::from("alphabet a b\nstart q0\n");
    let finals: Vec<String> = (1..states).filter(|_| src.uniform() < 0.4).map(|q| format!("q{q}")).collect();
    if !finals.is_empty() {
        text.push_str(&format!("accept {}\n", finals.join(" ")));
    }
    for p in 0..states {
        for sym in ["a", "b", "#"] {
            let count = if deterministic { (src.uniform() < 0.8) as u32 } else { src.below(3) };
            for _ in 0..count {
                let q = src.below(states);
                let mv = moves[src.below(5) as usize];
                text.push_str(&format!("trans q{p} {sym} q{q} {mv}\n"));
            }
        }
    }
    TwoDAutomaton::parse(&text).unwrap()
}

#[test]
fn twod_reachability_matches_references() {
    let mut src = RandomSource::new(31);
    let mut grids = Vec::new();
    for rows in 0..=2 {
        for cols in 0..=3 {
            grids.extend(all_grids(rows, cols, 2));
        }
    }
    for i in 0..60 {
        let a = random_twod(&mut src, i % 2 == 0);
        for g in &grids {
            let got = a.accepts(g).unwrap();
            assert_eq!(got, twod_accepts_dfs(&a, g), "{a}");
            if let Some(expected) = twod_deterministic_run(&a, g) {
                assert_eq!(got, expected, "{a}");
            }
        }
    }
}

#[test]
fn twod_trivial_automata() {
    let yes = TwoDAutomaton::parse("alphabet a b\nstart q\naccept q\n").unwrap();
    let no = TwoDAutomaton::parse("alphabet a b\nstart q\ntrans q a q R\ntrans q # q D\n").unwrap();
    for g in all_grids(0, 0, 2).iter().chain(all_grids(2, 2, 2).iter()) {
        assert!(yes.accepts(g).unwrap());
        assert!(!no.accepts(g).unwrap());
    }
}

#[test]
fn dioph_examples() {
    let eq = DiophantineEq::parse("x^3*y^2 - z^3 - 6").unwrap();
    let exps: Vec<[u32; 3]> = eq.terms().iter().map(|(_, e)| *e).collect();
    assert_eq!(exps, vec![[3, 2, 0], [0, 0, 3], [0, 0, 0]]);
    assert_eq!(eq.eval([0, 0, 0]), BigInt::from(-6));
    assert!(DiophantineEq::parse("x+y-z").unwrap().is_solution([3, 4, 7]));
    let big = [10_000_000u64; 3];
    assert_eq!(eq.eval(big), dioph_eval_reordered(&eq, big));
}

#[test]
fn dioph_exact_near_table_coordinates() {
    let eq = DiophantineEq::parse("x^3*y^2 - z^3 - 6").unwrap();
    for m in [400_001u64, 16_000_001, 40_960_001] {
        for p in [[m, m, m], [m, m - 1, 2], [2, m, m], [m - 7, 3, m - 1]] {
            let v = eq.eval(p);
            assert_eq!(v, dioph_eval_reordered(&eq, p));
            if let Some(small) = dioph_eval_i128(&eq, p) {
                assert_eq!(v, BigInt::from(small));
            }
        }
    }
}

#[test]
fn parse_errors_have_distinct_kinds() {
    assert_eq!(
        Nfa::parse("alphabet a\nstates p\nstart p\ntrans p a q\n").unwrap_err().kind,
        ParseErrorKind::UndeclaredState
    );
    assert_eq!(CnfFormula::parse("p cnf 1 1\n2 0\n").unwrap_err().kind, ParseErrorKind::BadLiteral);
    assert_eq!(DiophantineEq::parse("x^").unwrap_err().kind, ParseErrorKind::MalformedMonomial);
    assert_eq!(TwoDAutomaton::parse("alphabet a\nstart\n").unwrap_err().kind, ParseErrorKind::Syntax);
    assert_eq!(Nfa::parse("alphabet a\nstart p\ntrans p z p\n").unwrap_err().kind, ParseErrorKind::UnknownSymbol);
}

#[test]
fn decide_verifies_every_witness() {
    let mut src = RandomSource::new(41);
    let params = DirichletParams::new(2.0, 0).unwrap();
    for seed in 0..30 {
        let spec = SubsetSpec::Nfa(random_nfa(&mut src, 5));
        let config = PraxConfig::new(0.1, seed).unwrap();
        for problem in [Problem::Emptiness, Problem::Universality] {
            let d = spec.decide(&mut config.source(), FamilyKind::Word1D, problem, &params, &config).unwrap();
            if let Some(Element::Word(w)) = &d.verdict.witness {
                let SubsetSpec::Nfa(a) = &spec else { unreachable!() };
                assert_eq!(nfa_accepts_by_runs(a, w), problem == Problem::Emptiness);
            }
        }
    }
}

#[test]
fn block_path_universality() {
    // block length 3, accepts words starting with a: mass 1/2 under uniform blocks
    let text = "alphabet a b\nblocklen 3\nstart p\nfinal s\ntrans p a q\ntrans q a r\ntrans q b r\ntrans r a s\ntrans r b s\n";
    let spec = SubsetSpec::Nfa(Nfa::parse(text).unwrap());
    let budget = EnumerationBudget::new(3, 100).unwrap();
    let bracket = exact_mass(&spec, FamilyKind::UniformBlock, 2.0, 0, &budget).unwrap();
    assert!(bracket.contains(0.5));
    let params = DirichletParams::new(2.0, 0).unwrap();
    let config = PraxConfig::new(0.3, 0).unwrap();
    let d = spec.decide(&mut config.source(), FamilyKind::UniformBlock, Problem::Universality, &params, &config).unwrap();
    assert!(!d.verdict.answer);
    assert_eq!(d.max_len, None);
    assert_eq!(d.n, 32);
}
