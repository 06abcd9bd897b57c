use loqc_core::combinatorics::{ModeOccupation, Permutation};
use loqc_core::distinguishability::{obb_model, twirl, GramMatrix, InternalModel};
use loqc_core::engine::{output_distribution, ExperimentSpec};
use loqc_core::studies::{WitnessBench, WitnessOptions};
use loqc_core::unitaries::{fourier_unitary, haar_random, Unitary};
use loqc_core::witnesses::{finite_size_correction, forbidden_set, hoeffding_delta, Method};
use loqc_core::{ExperimentSpec32, GramMatrix32, InternalModel32, Unitary32};
use num_complex::{Complex, Complex64};
use proptest::prelude::*;

fn gram(n: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<(f64, f64)>>> {
    proptest::collection::vec(proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim), n)
        .prop_filter("degenerate vector", |vs| vs.iter().all(|v| v.iter().map(|z| z.0 * z.0 + z.1 * z.1).sum::<f64>() > 1e-3))
}

fn to_c64(vs: &[Vec<(f64, f64)>]) -> Vec<Vec<Complex64>> {
    vs.iter().map(|v| v.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).collect()
}

fn fourier_pf(n: usize, model: InternalModel<f64>) -> f64 {
    let spec = ExperimentSpec::new(fourier_unitary::<f64>(n).unwrap(), ModeOccupation::first_modes(n, n).unwrap(), model)
        .unwrap();
    let d = output_distribution(&spec).unwrap();
    forbidden_set(n).unwrap().iter().map(|s| d.probability(s)).sum()
}

fn shift(n: usize) -> Permutation {
    Permutation::new((0..n).map(|i| (i + 1) % n).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distributions_are_normalized(
        (n, m, vs) in (1usize..=4).prop_flat_map(|n| (Just(n), n..=5usize, gram(n, 2))),
        seed in any::<u64>(),
    ) {
        let spec = ExperimentSpec::new(
            haar_random(m, seed).unwrap(),
            ModeOccupation::first_modes(n, m).unwrap(),
            InternalModel::PureProduct(GramMatrix::from_vectors(&to_c64(&vs)).unwrap()),
        ).unwrap();
        let d = output_distribution(&spec).unwrap();
        prop_assert!(d.normalization_residue() <= 1e-10);
        prop_assert!(d.entries().iter().all(|(_, p)| *p >= -1e-12));
    }

    #[test]
    fn single_precision_tracks_double(
        (n, vs) in (2usize..=3).prop_flat_map(|n| (Just(n), gram(n, 2))),
        seed in any::<u64>(),
    ) {
        let m = n + 1;
        let u64_: Unitary<f64> = haar_random(m, seed).unwrap();
        let g64 = GramMatrix::from_vectors(&to_c64(&vs)).unwrap();
        let v32: Vec<Vec<Complex<f32>>> =
            vs.iter().map(|v| v.iter().map(|&(a, b)| Complex::new(a as f32, b as f32)).collect()).collect();
        let input = ModeOccupation::first_modes(n, m).unwrap();
        let d64 = output_distribution(&ExperimentSpec::new(u64_.clone(), input.clone(), InternalModel::PureProduct(g64)).unwrap()).unwrap();
        let spec32: ExperimentSpec32 = ExperimentSpec::new(
            Unitary32::from_f64(&u64_).unwrap(),
            input,
            InternalModel32::PureProduct(GramMatrix32::from_vectors(&v32).unwrap()),
        ).unwrap();
        let d32 = output_distribution(&spec32).unwrap();
        for (s, p) in d64.entries() {
            prop_assert!((d32.probability(s) as f64 - p).abs() <= 1e-4);
        }
    }

    #[test]
    fn fourier_forbidden_mass_respects_cyclic_relabeling(
        (n, vs) in (3usize..=5).prop_flat_map(|n| (Just(n), gram(n, 3))),
    ) {
        let g = GramMatrix::from_vectors(&to_c64(&vs)).unwrap();
        let base = fourier_pf(n, InternalModel::PureProduct(g.clone()));
        let rotated = fourier_pf(n, InternalModel::PureProduct(g.relabeled(&shift(n)).unwrap()));
        prop_assert!((base - rotated).abs() <= 1e-10);
    }

    #[test]
    fn three_photon_forbidden_mass_is_twirl_invariant(vs in gram(3, 3)) {
        let gi = GramMatrix::from_vectors(&to_c64(&vs)).unwrap().gi_vector().unwrap();
        let a = fourier_pf(3, InternalModel::DirectGi(gi.clone()));
        let b = fourier_pf(3, InternalModel::DirectGi(twirl(&gi)));
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn cyclic_reads_the_neighbour_product(x in proptest::array::uniform3(0.6f64..1.0)) {
        let bench = WitnessBench::new(3, WitnessOptions::default()).unwrap();
        let g = GramMatrix::from_real_overlaps(3, &[(0, 1, x[0]), (0, 2, x[1]), (1, 2, x[2])]);
        prop_assume!(g.is_ok());
        let model = InternalModel::PureProduct(g.unwrap());
        let r = bench.evaluate(Method::Cyclic, &model, None, None).unwrap();
        prop_assert!((r.c_raw - x[0] * x[1] * x[2]).abs() <= 1e-9);
    }

    #[test]
    fn corrections_only_lower_the_estimate(
        c in -0.5f64..1.0,
        shots in 1u64..1_000_000,
        eps in 0.001f64..1.0,
        k in 0usize..3,
    ) {
        let method = [Method::Fourier, Method::Cyclic, Method::Hom][k];
        let corrected = finite_size_correction(c, method, 3, shots, eps).unwrap();
        prop_assert!(corrected <= c);
        prop_assert!(hoeffding_delta(shots + 1, eps).unwrap() <= hoeffding_delta(shots, eps).unwrap());
    }

    #[test]
    fn obb_witnesses_stay_in_range(eps in 0.0f64..1.0) {
        let bench = WitnessBench::new(3, WitnessOptions::default()).unwrap();
        let model = InternalModel::PartitionMixture(obb_model(3, eps).unwrap());
        let c = (1.0 - eps).powi(3);
        for m in bench.methods() {
            let r = bench.evaluate(m, &model, None, None).unwrap();
            prop_assert!(r.c_raw <= c + 1e-9, "{} {} > {}", m, r.c_raw, c);
        }
    }
}

#[test]
fn four_photon_forbidden_mass_sees_only_the_cyclic_group() {
    // (1,3)(2,4) is a power of the cyclic shift, (1,2)(3,4) is not
    let g = GramMatrix::from_real_overlaps(4, &[(0, 2, 0.8), (1, 3, 0.8)]).unwrap();
    let h = GramMatrix::from_real_overlaps(4, &[(0, 1, 0.8), (2, 3, 0.8)]).unwrap();
    let a = fourier_pf(4, InternalModel::PureProduct(g.clone()));
    let b = fourier_pf(4, InternalModel::PureProduct(h.clone()));
    let ta = fourier_pf(4, InternalModel::DirectGi(twirl(&g.gi_vector().unwrap())));
    let tb = fourier_pf(4, InternalModel::DirectGi(twirl(&h.gi_vector().unwrap())));
    assert!((ta - tb).abs() <= 1e-12);
    assert!((a - b).abs() > 1e-2, "{a} vs {b}");
}
