use proptest::prelude::*;
use proptest::sample::select;

use sldc_core::format::{code_document, read_code, to_json};
use sldc_core::pir::{answer, gen_query, reconstruct, scheme_from_sldc};
use sldc_core::{build_sldc, decode, encode, BitVector};

fn grid() -> impl Strategy<Value = (usize, usize)> {
    select(vec![(2, 1), (2, 2), (2, 3), (3, 2), (4, 2)])
}

fn block_for(n: usize, k: usize) -> impl Strategy<Value = BitVector> {
    let bits = n.pow(k as u32) * (n - 1) * k;
    proptest::collection::vec(any::<bool>(), bits).prop_map(BitVector::from_bits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_decoding_set_recovers_its_message(
        (n, k, block) in grid().prop_flat_map(|(n, k)| (Just(n), Just(k), block_for(n, k)))
    ) {
        let code = build_sldc(n, k).unwrap();
        let x = encode(&code, &block).unwrap();
        let messages = code.split_messages(&block).unwrap();
        for (kk, sup) in code.supersets().iter().enumerate() {
            for (j, set) in sup.sets.iter().enumerate() {
                let values: Vec<BitVector> = set.iter().map(|&s| x[s].clone()).collect();
                prop_assert_eq!(&decode(&code, kk, j, &values).unwrap(), &messages[kk]);
            }
        }
    }

    #[test]
    fn pir_round_trip(
        (n, k, block, seed) in grid().prop_flat_map(|(n, k)| (Just(n), Just(k), block_for(n, k), any::<u64>()))
    ) {
        use rand::SeedableRng;
        let scheme = scheme_from_sldc(&build_sldc(n, k).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let messages = scheme.code().split_messages(&block).unwrap();
        for theta in 0..k {
            let bundle = gen_query(&scheme, theta, &mut rng).unwrap();
            let answers: Vec<BitVector> = bundle
                .queries
                .iter()
                .enumerate()
                .map(|(db, &q)| answer(&scheme, db, q, &block).unwrap())
                .collect();
            prop_assert_eq!(&reconstruct(&scheme, &bundle, &answers).unwrap(), &messages[theta]);
        }
    }

    #[test]
    fn documents_round_trip((n, k) in grid()) {
        let code = build_sldc(n, k).unwrap();
        let text = to_json(&code_document(&code).unwrap()).unwrap();
        prop_assert_eq!(read_code(&text).unwrap(), code);
    }
}
