//! Code-analysis routines checked against closed forms and dense
//! recomputation: subsystem-variance searches on codes whose worst-case
//! deviation is known exactly, projector certificates with hand-computed
//! escape probabilities, and distinguishing operators whose gaps follow
//! from single amplitudes.

mod common;

use std::f64::consts::E;

use aqec_lll::aqec::{
    clifford_average_overlap, code_condition_report, code_state, commuting_projector_certificate,
    distinguishing_operator, evaluate_variance_point, subsystem_variance, sv_lower_bound_check,
    u1_filling_bound, verify_distinguishability, Code, SearchSettings,
};
use aqec_lll::circuit::{
    apply_circuit, lightcone_function, Circuit, Connectivity, Gate, LocalOperator, NamedGate,
    Region, StateVector,
};
use aqec_lll::linalg::{complex_gaussian, operator_norm_hermitian, seeded_rng, CMatrix, C64};
use aqec_lll::Error;
use common::{random_circuit, random_state, w_state};
use rand::Rng;

/// Settings dense enough to pin the fixtures to their closed forms.
fn dense_search() -> SearchSettings {
    SearchSettings {
        grid_points: 101,
        random_samples: 400,
        refine_iters: 3,
        seed: 7,
    }
}

/// State with the given nonzero amplitudes, all on `n` qubits.
fn sparse_state(n: usize, entries: &[(usize, C64)]) -> StateVector {
    let mut amps = vec![C64::ZERO; 1 << n];
    for &(idx, amp) in entries {
        amps[idx] = amp;
    }
    StateVector::from_amplitudes(amps).expect("normalized amplitudes")
}

/// The two-qubit repetition code `{|00⟩, |11⟩}`.
fn repetition_code() -> Code {
    let b0 = StateVector::basis_state(2, 0b00).expect("basis state");
    let b1 = StateVector::basis_state(2, 0b11).expect("basis state");
    Code::new(2, 1, vec![b0, b1]).expect("valid code")
}

/// The code `{|0…0⟩, W_n}`.
fn w_code(n: usize) -> Code {
    let b0 = StateVector::zero_state(n).expect("zero state");
    Code::new(n, 1, vec![b0, w_state(n)]).expect("valid code")
}

/// Four-qubit code whose basis states are the paired bitstring sums
/// `(|b⟩ + |b̄⟩)/√2` over complementary pairs; every single-site reduced
/// matrix of every code state is maximally mixed.
fn paired_bitstring_code() -> Code {
    let r = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let pairs = [
        (0b0000, 0b1111),
        (0b0011, 0b1100),
        (0b0101, 0b1010),
        (0b0110, 0b1001),
    ];
    let basis = pairs
        .iter()
        .map(|&(a, b)| sparse_state(4, &[(a, r), (b, r)]))
        .collect();
    Code::new(4, 2, basis).expect("valid code")
}

/// `|1⟩⟨1|` on one site.
fn excitation_projector(site: usize) -> LocalOperator {
    let mut m = CMatrix::zeros(2, 2);
    m[(1, 1)] = C64::ONE;
    LocalOperator::new(Region::single(site), m).expect("valid projector")
}

fn x_layer_circuit(n: usize) -> Circuit {
    let layer = (0..n)
        .map(|q| Gate::Named {
            gate: NamedGate::X,
            qubits: vec![q],
        })
        .collect();
    Circuit {
        n,
        connectivity: Connectivity::AllToAll,
        layers: vec![layer],
    }
}

fn bell_circuit() -> Circuit {
    Circuit {
        n: 2,
        connectivity: Connectivity::AllToAll,
        layers: vec![
            vec![Gate::Named {
                gate: NamedGate::H,
                qubits: vec![0],
            }],
            vec![Gate::Named {
                gate: NamedGate::CX,
                qubits: vec![0, 1],
            }],
        ],
    }
}

#[test]
fn trivial_code_has_zero_variance() {
    let code = Code::new(
        2,
        0,
        vec![sparse_state(2, &[(0, C64::from(0.6)), (3, C64::from(0.8))])],
    )
    .expect("valid code");
    let report = subsystem_variance(&code, 1, &SearchSettings::default()).expect("search runs");
    assert!(report.epsilon <= 1e-12, "epsilon = {}", report.epsilon);
}

#[test]
fn repetition_code_variance_is_one_on_single_sites() {
    let report = subsystem_variance(&repetition_code(), 1, &dense_search()).expect("search runs");
    assert!(
        (report.epsilon - 1.0).abs() <= 1e-9,
        "epsilon = {}",
        report.epsilon
    );
    // The maximum sits at a basis state: one coefficient carries all the
    // weight.
    let weights: Vec<f64> = report
        .argmax_coeffs
        .iter()
        .map(|&[re, im]| re * re + im * im)
        .collect();
    assert!(
        weights.iter().any(|&w| w > 1.0 - 1e-6),
        "weights {weights:?}"
    );
}

#[test]
fn w_code_single_site_variance_matches_the_closed_form() {
    for n in [4usize, 6] {
        let report = subsystem_variance(&w_code(n), 1, &dense_search()).expect("search runs");
        let expected = 1.0 / (n as f64).sqrt();
        assert!(
            (report.epsilon - expected).abs() <= 1e-6,
            "n = {n}: epsilon = {}, expected {expected}",
            report.epsilon
        );
    }
}

#[test]
fn w_code_variance_point_matches_dense_recomputation() {
    // For ψ = cos θ |0…0⟩ + e^{iφ} sin θ |W⟩ the single-site reduced
    // matrix deviates from the code average by a diagonal shift
    // δ = 1/(2n) − sin²θ/n and an off-diagonal term z = cos θ sin θ/√n,
    // giving trace norm 2√(δ² + |z|²).
    let n = 4usize;
    let code = w_code(n);
    let (theta, phi) = (0.7f64, 0.3f64);
    let coeffs = [C64::from(theta.cos()), C64::from_polar(theta.sin(), phi)];
    let value =
        evaluate_variance_point(&code, &Region::single(2), &coeffs).expect("evaluation runs");
    let shift = 0.5 / n as f64 - theta.sin().powi(2) / n as f64;
    let cross = theta.cos() * theta.sin() / (n as f64).sqrt();
    let expected = 2.0 * (shift * shift + cross * cross).sqrt();
    assert!(
        (value - expected).abs() <= 1e-10,
        "value {value} vs {expected}"
    );
}

#[test]
fn paired_bitstring_code_has_vanishing_single_site_variance() {
    let report = subsystem_variance(&paired_bitstring_code(), 1, &SearchSettings::default())
        .expect("search runs");
    assert!(report.epsilon <= 1e-9, "epsilon = {}", report.epsilon);
}

#[test]
fn variance_grows_with_region_size() {
    let code = w_code(4);
    let settings = dense_search();
    let mut last = 0.0f64;
    for d in 1..=3 {
        let report = subsystem_variance(&code, d, &settings).expect("search runs");
        assert!(
            report.epsilon >= last - 1e-9,
            "epsilon({d}) = {} < epsilon({}) = {last}",
            report.epsilon,
            d - 1
        );
        last = report.epsilon;
    }
}

#[test]
fn variance_rejects_oversized_regions() {
    let code = repetition_code();
    assert!(matches!(
        subsystem_variance(&code, 3, &SearchSettings::default()),
        Err(Error::InvalidInput(_))
    ));
    let wide =
        Code::new(8, 0, vec![StateVector::zero_state(8).expect("state")]).expect("valid code");
    assert!(matches!(
        subsystem_variance(&wide, 8, &SearchSettings::default()),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn search_reports_reproduce_their_argmax() {
    for code in [repetition_code(), w_code(4), paired_bitstring_code()] {
        let report = subsystem_variance(&code, 1, &SearchSettings::default()).expect("search");
        let coeffs: Vec<C64> = report
            .argmax_coeffs
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        let replayed = evaluate_variance_point(&code, &report.argmax_region, &coeffs)
            .expect("re-evaluation runs");
        assert!(
            (replayed - report.epsilon).abs() <= 1e-9,
            "replayed {replayed} vs reported {}",
            report.epsilon
        );
    }
}

#[test]
fn certificate_accepts_excitation_projectors_on_the_vacuum() {
    let projectors: Vec<LocalOperator> = (0..3).map(excitation_projector).collect();
    let regions: Vec<Region> = (0..3).map(Region::single).collect();
    let state = StateVector::zero_state(3).expect("state");
    let report =
        commuting_projector_certificate(&projectors, &regions, &state, 1.0).expect("certificate");
    assert!(report.max_probability.abs() <= 1e-15);
    assert!(report.condition_holds);
    assert!((report.bound.expect("bound present") - 1.0).abs() <= 1e-15);
    assert!((report.exact - 1.0).abs() <= 1e-12);
    assert!(!report.contradiction);
}

#[test]
fn certificate_bounds_a_biased_product_state() {
    let site = [C64::from(0.9f64.sqrt()), C64::from(0.1f64.sqrt())];
    let mut amps = Vec::with_capacity(8);
    for idx in 0..8usize {
        let mut a = C64::ONE;
        for q in 0..3 {
            a *= site[idx >> (2 - q) & 1];
        }
        amps.push(a);
    }
    let state = StateVector::from_amplitudes(amps).expect("product state");
    let projectors: Vec<LocalOperator> = (0..3).map(excitation_projector).collect();
    let regions: Vec<Region> = (0..3).map(Region::single).collect();
    let report =
        commuting_projector_certificate(&projectors, &regions, &state, 1.0).expect("certificate");
    assert!((report.max_probability - 0.1).abs() <= 1e-12);
    assert_eq!(report.overlap_degree, 0);
    assert!(report.condition_holds);
    let bound = report.bound.expect("bound present");
    assert!((bound - (1.0 - 0.1 * E).powi(3)).abs() <= 1e-12);
    assert!((report.exact - 0.729).abs() <= 1e-12);
    assert!(report.exact >= bound);
    assert!(!report.contradiction);
}

#[test]
fn uniform_superposition_contradicts_its_certificate() {
    let projectors: Vec<LocalOperator> = (0..3).map(excitation_projector).collect();
    let regions: Vec<Region> = (0..3).map(Region::single).collect();
    let report = commuting_projector_certificate(&projectors, &regions, &w_state(3), 1.0)
        .expect("certificate");
    assert!((report.max_probability - 1.0 / 3.0).abs() <= 1e-12);
    assert!((report.condition_lhs - E / 3.0).abs() <= 1e-12);
    assert!(report.condition_holds);
    let bound = report.bound.expect("bound present");
    assert!((bound - (1.0 - E / 3.0).powi(3)).abs() <= 1e-12);
    assert!(report.exact.abs() <= 1e-12);
    assert!(
        report.contradiction,
        "exact {} beat the certified bound {bound} and must be flagged",
        report.exact
    );
}

#[test]
fn certificate_rejects_malformed_inputs() {
    let state = StateVector::zero_state(2).expect("state");
    let p0 = excitation_projector(0);
    let r0 = Region::single(0);

    // Mismatched lengths.
    assert!(commuting_projector_certificate(std::slice::from_ref(&p0), &[], &state, 1.0).is_err());
    // Weighting below 1.
    assert!(commuting_projector_certificate(
        std::slice::from_ref(&p0),
        std::slice::from_ref(&r0),
        &state,
        0.5,
    )
    .is_err());
    // Region misses the support.
    assert!(commuting_projector_certificate(
        std::slice::from_ref(&p0),
        &[Region::single(1)],
        &state,
        1.0,
    )
    .is_err());
    // Not idempotent.
    let half = LocalOperator::new(Region::single(0), CMatrix::identity(2, 2).unscale(2.0))
        .expect("operator");
    assert!(
        commuting_projector_certificate(&[half], std::slice::from_ref(&r0), &state, 1.0).is_err()
    );
    // Overlapping non-commuting pair: |1⟩⟨1| and |−⟩⟨−| on the same site.
    let minus = LocalOperator::new(
        Region::single(0),
        CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from(0.5),
                C64::from(-0.5),
                C64::from(-0.5),
                C64::from(0.5),
            ],
        ),
    )
    .expect("operator");
    assert!(commuting_projector_certificate(&[p0, minus], &[r0.clone(), r0], &state, 1.0).is_err());
}

#[test]
fn certificate_matches_the_parent_projector_overlap() {
    // The parent projectors of a circuit multiply out to the projector
    // onto its output state, so the exact escape probability of any other
    // state is the squared overlap.
    let mut rng = seeded_rng(31);
    for trial in 0..12 {
        let n = 4;
        let circuit = random_circuit(&mut rng, n, 1 + trial % 2, Connectivity::AllToAll);
        let psi1 = apply_circuit(&circuit, &StateVector::zero_state(n).expect("state"))
            .expect("circuit runs");
        let psi2 = random_state(&mut rng, n);
        let projectors: Vec<LocalOperator> = (0..n)
            .map(|site| {
                aqec_lll::circuit::conjugated_parent_projector(&circuit, site)
                    .expect("projector builds")
            })
            .collect();
        let regions: Vec<Region> = projectors.iter().map(|p| p.support.clone()).collect();
        let report = commuting_projector_certificate(&projectors, &regions, &psi2, 1.0)
            .expect("certificate");
        let overlap = psi1.inner(&psi2).expect("inner product").norm();
        assert!(
            (report.exact - overlap * overlap).abs() <= 1e-10,
            "trial {trial}: exact {} vs overlap² {}",
            report.exact,
            overlap * overlap
        );
    }
}

#[test]
fn distinguishing_operator_finds_the_flipped_state() {
    let identity = Circuit::identity(3, Connectivity::AllToAll);
    let flipped = StateVector::basis_state(3, 0b111).expect("state");
    let report = distinguishing_operator(&identity, &flipped).expect("operator builds");
    assert!((report.value - 2.0).abs() <= 1e-12);
    assert_eq!(report.operator.support.indices(), &[0]);
    let norm = operator_norm_hermitian(&report.operator.matrix).expect("norm");
    assert!((norm - 1.0).abs() <= 1e-10);
    assert!(report.satisfied);

    // The observable takes value −1 on the circuit output and +1 on the
    // flipped state.
    let psi1 = StateVector::zero_state(3).expect("state");
    let on_output = report.operator.expectation(&psi1).expect("expectation").re;
    let on_other = report
        .operator
        .expectation(&flipped)
        .expect("expectation")
        .re;
    assert!((on_output + 1.0).abs() <= 1e-12);
    assert!((on_other - 1.0).abs() <= 1e-12);
}

#[test]
fn distinguishing_operator_on_superposed_states() {
    let r = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let bell = sparse_state(2, &[(0b00, r), (0b11, r)]);
    let identity2 = Circuit::identity(2, Connectivity::AllToAll);
    let report = distinguishing_operator(&identity2, &bell).expect("operator builds");
    assert!((report.value - 1.0).abs() <= 1e-12);
    assert_eq!(report.operator.support.indices(), &[0]);

    let identity4 = Circuit::identity(4, Connectivity::AllToAll);
    let report = distinguishing_operator(&identity4, &w_state(4)).expect("operator builds");
    assert!((report.value - 0.5).abs() <= 1e-12);
}

#[test]
fn verify_distinguishability_certifies_orthogonal_product_states() {
    let identity = Circuit::identity(2, Connectivity::AllToAll);
    let flip = x_layer_circuit(2);
    let report = verify_distinguishability(&identity, &flip, 0.0).expect("verification runs");
    assert_eq!(report.t, 1);
    assert!((report.value - 2.0).abs() <= 1e-12);
    // δ = 0 keeps the overlap term at 1, so the light cone decides.
    assert!((report.bound - 2.0 / (E * 16.0)).abs() <= 1e-12);
    assert!(report.satisfied);
}

#[test]
fn verify_distinguishability_certifies_the_bell_pair() {
    let identity = Circuit::identity(2, Connectivity::AllToAll);
    let report =
        verify_distinguishability(&identity, &bell_circuit(), 0.71).expect("verification runs");
    assert_eq!(report.t, 2);
    assert!((report.value - 1.0).abs() <= 1e-12);
    assert!((report.bound - 2.0 / (E * 256.0)).abs() <= 1e-12);
    assert!(report.satisfied);
}

#[test]
fn verify_distinguishability_rejects_identical_circuits() {
    let circuit = bell_circuit();
    let err = verify_distinguishability(&circuit, &circuit.clone(), 0.5).unwrap_err();
    assert!(matches!(err, Error::Inapplicable(_)), "got {err:?}");
}

#[test]
fn verify_distinguishability_rejects_bad_inputs() {
    let identity = Circuit::identity(2, Connectivity::AllToAll);
    let flip = x_layer_circuit(2);
    assert!(matches!(
        verify_distinguishability(&identity, &flip, 1.0),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        verify_distinguishability(&identity, &flip, -0.1),
        Err(Error::InvalidInput(_))
    ));
    let mut lined = flip.clone();
    lined.connectivity = Connectivity::line(2, false);
    assert!(matches!(
        verify_distinguishability(&identity, &lined, 0.0),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn random_circuit_pairs_respect_the_lightcone_bound() {
    let mut rng = seeded_rng(92);
    let mut evaluated = 0usize;
    for n in [4usize, 6] {
        for conn in [Connectivity::AllToAll, Connectivity::line(n, false)] {
            for _ in 0..15 {
                let depth1 = rng.random_range(1..=2);
                let depth2 = rng.random_range(1..=2);
                let c1 = random_circuit(&mut rng, n, depth1, conn.clone());
                let c2 = random_circuit(&mut rng, n, depth2, conn.clone());
                let zero = StateVector::zero_state(n).expect("state");
                let psi1 = apply_circuit(&c1, &zero).expect("circuit runs");
                let psi2 = apply_circuit(&c2, &zero).expect("circuit runs");
                let overlap = psi1.inner(&psi2).expect("inner product").norm();
                if overlap > 0.999 {
                    continue;
                }
                let report =
                    verify_distinguishability(&c1, &c2, overlap).expect("verification runs");
                evaluated += 1;
                assert!(
                    report.satisfied,
                    "n {n}, conn {conn:?}: value {} ≤ bound {}",
                    report.value, report.bound
                );
                assert!(report.value >= 0.0 && report.value <= 2.0);
                let t = depth1.max(depth2);
                let cone = lightcone_function(&conn, t);
                assert!(
                    (report.operator.support.len() as u64) <= cone,
                    "support {} exceeds the {t}-layer cone {cone}",
                    report.operator.support.len()
                );
            }
        }
    }
    assert!(evaluated >= 55, "only {evaluated} of 60 pairs were usable");
}

#[test]
fn distinguishability_is_capped_by_subsystem_variance() {
    let code = w_code(4);
    let settings = dense_search();
    let eps: Vec<f64> = (1..=2)
        .map(|d| {
            subsystem_variance(&code, d, &settings)
                .expect("search runs")
                .epsilon
        })
        .collect();
    let mut rng = seeded_rng(55);
    for _ in 0..30 {
        let d = rng.random_range(1..=2usize);
        let mut sites: Vec<usize> = (0..4).collect();
        for i in (1..sites.len()).rev() {
            sites.swap(i, rng.random_range(0..=i));
        }
        let region = Region::new(sites[..d].to_vec());
        let dim = 1usize << d;
        let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(&mut rng));
        let herm = (&g + &g.adjoint()).unscale(2.0);
        let norm = operator_norm_hermitian(&herm).expect("norm");
        if norm < 1e-9 {
            continue;
        }
        let op = LocalOperator::new(region.clone(), herm.unscale(norm)).expect("operator");

        let c1: Vec<C64> = (0..2).map(|_| complex_gaussian(&mut rng)).collect();
        let c2: Vec<C64> = (0..2).map(|_| complex_gaussian(&mut rng)).collect();
        let psi1 = code_state(&code, &c1).expect("code state");
        let psi2 = code_state(&code, &c2).expect("code state");
        let gap = (op.expectation(&psi1).expect("expectation").re
            - op.expectation(&psi2).expect("expectation").re)
            .abs();
        assert!(
            gap <= 2.0 * eps[d - 1] + 1e-8,
            "gap {gap} exceeds 2·epsilon({d}) = {}",
            2.0 * eps[d - 1]
        );
        // Pointwise chain: the gap is also capped by the two evaluated
        // deviations directly.
        let v1 = evaluate_variance_point(&code, &region, &c1).expect("evaluation");
        let v2 = evaluate_variance_point(&code, &region, &c2).expect("evaluation");
        assert!(gap <= v1 + v2 + 1e-10, "gap {gap} exceeds {v1} + {v2}");
    }
}

#[test]
fn clifford_average_matches_the_design_value() {
    let mut rng = seeded_rng(3);
    let mut states = vec![
        StateVector::basis_state(1, 0).expect("state"),
        sparse_state(
            1,
            &[
                (0, C64::from(std::f64::consts::FRAC_1_SQRT_2)),
                (1, C64::from(std::f64::consts::FRAC_1_SQRT_2)),
            ],
        ),
    ];
    for _ in 0..10 {
        states.push(random_state(&mut rng, 1));
    }
    for state in &states {
        let avg = clifford_average_overlap(state).expect("average");
        assert!((avg - 0.5).abs() <= 1e-10, "average {avg}");
    }
    assert!(clifford_average_overlap(&StateVector::zero_state(2).expect("state")).is_err());
}

#[test]
fn condition_report_matches_the_worked_example() {
    let conn = Connectivity::AllToAll;
    let report = code_condition_report(0.01, &conn, 1, 1, 2).expect("report");
    let expected = 1.0 / (E * 16.0);
    assert!((report.universal_rhs - expected).abs() <= 1e-12);
    // With k/n = 1/2 the Clifford threshold is also decided by the light
    // cone: min{1 − 2^{−1/2}, 1/16} = 1/16.
    assert!((report.clifford_rhs - expected).abs() <= 1e-12);
    assert!(report.universal_holds && report.clifford_holds);
    let implication = report.implication.expect("implication present");
    assert!(implication.contains('1'), "{implication}");

    // Boundary equality passes.
    let at_boundary = code_condition_report(expected, &conn, 1, 1, 2).expect("report");
    assert!(at_boundary.universal_holds);

    // Too much variance rules nothing out.
    let loose = code_condition_report(0.05, &conn, 1, 1, 2).expect("report");
    assert!(!loose.universal_holds && !loose.clifford_holds);
    assert!(loose.implication.is_none());
}

#[test]
fn filling_bound_matches_hand_values() {
    let b = u1_filling_bound(1.0, &[1.0; 10], 10).expect("bound");
    assert!((b - 0.1).abs() <= 1e-15);
    let zero = u1_filling_bound(0.0, &[0.7, 0.3], 6).expect("bound");
    assert!(zero.abs() <= 1e-15);

    // For the `{|0…0⟩, W_n}` code the logical charge range is 1 and each
    // site range is 1, giving 1/n, which must undercut the measured
    // single-site variance.
    let n = 4usize;
    let bound = u1_filling_bound(1.0, &vec![1.0; n], n).expect("bound");
    assert!((bound - 0.25).abs() <= 1e-15);
    let eps = subsystem_variance(&w_code(n), 1, &dense_search())
        .expect("search runs")
        .epsilon;
    assert!(bound <= eps + 1e-9, "bound {bound} vs epsilon {eps}");
}

#[test]
fn sv_bound_check_on_the_repetition_code() {
    let code = repetition_code();
    let identity = Circuit::identity(2, Connectivity::AllToAll);
    let flip = x_layer_circuit(2);
    let report =
        sv_lower_bound_check(&code, &identity, &flip, 1, 0.0, &dense_search()).expect("check runs");
    assert!(report.applicable);
    assert_eq!(report.d, 2);
    assert_eq!(report.cone_size, 2);
    assert_eq!(report.cone_size_4t, 16);
    assert!((report.threshold - 1.0 / (E * 16.0)).abs() <= 1e-12);
    // Any code state deviates from the average by trace norm 1 on the
    // full pair of sites.
    assert!((report.epsilon - 1.0).abs() <= 1e-9);
    assert!(report.holds);
    assert!(report.margin > 0.9);
}

#[test]
fn sv_bound_check_rejects_non_code_preparations() {
    let code = repetition_code();
    let identity = Circuit::identity(2, Connectivity::AllToAll);
    let hadamard = Circuit {
        n: 2,
        connectivity: Connectivity::AllToAll,
        layers: vec![vec![Gate::Named {
            gate: NamedGate::H,
            qubits: vec![0],
        }]],
    };
    let err =
        sv_lower_bound_check(&code, &identity, &hadamard, 1, 0.0, &dense_search()).unwrap_err();
    assert!(matches!(err, Error::Inapplicable(_)), "got {err:?}");
}

#[test]
fn sv_bound_check_rejects_circuits_deeper_than_claimed() {
    let code = repetition_code();
    let identity = Circuit::identity(2, Connectivity::AllToAll);
    let flip = x_layer_circuit(2);
    let err = sv_lower_bound_check(&code, &identity, &flip, 0, 0.0, &dense_search()).unwrap_err();
    assert!(matches!(err, Error::InvalidInput(_)), "got {err:?}");
}

#[test]
fn code_json_round_trips() {
    let text = r#"{
        "n": 2,
        "k": 1,
        "basis": [
            {"circuit": {"n": 2, "connectivity": {"kind": "all-to-all"}, "layers": []}},
            {"amplitudes": [[0, 0], [0, 0], [0, 0], [1, 0]]}
        ]
    }"#;
    let code: Code = serde_json::from_str(text).expect("code parses");
    assert_eq!(code.physical_qubits(), 2);
    assert_eq!(code.logical_qubits(), 1);
    let b1 = &code.basis()[1];
    assert!((b1.amplitudes()[3] - C64::ONE).norm() <= 1e-15);

    let echoed = serde_json::to_string(&code).expect("code serializes");
    let reparsed: Code = serde_json::from_str(&echoed).expect("echo parses");
    for (a, b) in code.basis().iter().zip(reparsed.basis()) {
        assert!((a.inner(b).expect("inner").norm() - 1.0).abs() <= 1e-12);
    }

    let skewed = r#"{
        "n": 1,
        "k": 1,
        "basis": [
            {"amplitudes": [[1, 0], [0, 0]]},
            {"amplitudes": [[0.6, 0], [0.8, 0]]}
        ]
    }"#;
    assert!(serde_json::from_str::<Code>(skewed).is_err());
}
