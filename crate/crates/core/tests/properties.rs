use proptest::prelude::*;
use voicepack::pipeline::{decode_message, encode_message, VoicePayload};
use voicepack::{compress, decompress, AlgorithmId, CodecConfig, CompressedBlob};

/// Random octets, or text over a small alphabet so the codecs have
/// something to find.
fn payload() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        prop::collection::vec(any::<u8>(), 0..3000),
        prop::collection::vec(prop::sample::select(b"abcd ".to_vec()), 0..3000),
        (prop::collection::vec(any::<u8>(), 1..40), 1..80usize)
            .prop_map(|(unit, times)| unit.repeat(times)),
    ]
}

fn algorithm() -> impl Strategy<Value = AlgorithmId> {
    prop::sample::select(AlgorithmId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn every_codec_round_trips(x in payload(), alg in algorithm()) {
        let cfg = CodecConfig::default();
        let blob = compress(&x, alg, &cfg);
        prop_assert_eq!(blob.original_len as usize, x.len());
        let parsed = CompressedBlob::from_bytes(&blob.to_bytes()).unwrap();
        prop_assert_eq!(decompress(&parsed, &cfg).unwrap(), x);
    }

    #[test]
    fn tuned_configs_round_trip(
        x in payload(),
        bits in 9u32..=16,
        order in 0usize..=8,
        block in 1usize..5000,
    ) {
        let cfg = CodecConfig::default()
            .with_lzw_max_code_bits(bits).unwrap()
            .with_ppm_order(order).unwrap()
            .with_bwt_block_size(block).unwrap()
            .with_lz_window(1024).unwrap()
            .with_lz_match_range(2, 40).unwrap();
        for alg in [AlgorithmId::Lzw, AlgorithmId::Ppm, AlgorithmId::Bwt, AlgorithmId::Lzma] {
            prop_assert_eq!(decompress(&compress(&x, alg, &cfg), &cfg).unwrap(), x.clone(), "{}", alg);
        }
    }

    #[test]
    fn compression_is_deterministic(x in payload(), alg in algorithm()) {
        let cfg = CodecConfig::default();
        prop_assert_eq!(compress(&x, alg, &cfg), compress(&x, alg, &cfg));
    }

    #[test]
    fn repeating_a_payload_costs_less_than_double(x in payload()) {
        let cfg = CodecConfig::default();
        let doubled = [x.as_slice(), x.as_slice()].concat();
        for alg in [AlgorithmId::Lzw, AlgorithmId::Lzma, AlgorithmId::Ppm, AlgorithmId::Bwt] {
            let once = compress(&x, alg, &cfg).serialized_len();
            let twice = compress(&doubled, alg, &cfg).serialized_len();
            prop_assert!(twice < 2 * once, "{}: {} vs 2 x {}", alg, twice, once);
        }
    }

    #[test]
    fn pipeline_round_trips(x in payload(), alg in algorithm(), reference in any::<u8>()) {
        let cfg = CodecConfig::default();
        let voice = VoicePayload::new(x.clone(), "prop");
        let bundle = encode_message(&voice, alg, &cfg, reference).unwrap();
        prop_assert_eq!(decode_message(&bundle, &cfg).unwrap().bytes, x);
    }
}
