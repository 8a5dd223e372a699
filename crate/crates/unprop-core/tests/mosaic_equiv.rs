use unprop_core::{apply_mosaic, item_rng, mix_seed, unprop, Channels, UnpropParams};
use unprop_testkit::{mosaic_reference, random_image};

#[test]
fn unprop_matches_the_reference_mosaic() {
    let params = UnpropParams {
        apply_prob: 1.0,
        ..UnpropParams::default()
    };
    for (w, h) in [(8u32, 8u32), (32, 32), (17, 29)] {
        for seed in 0..20u64 {
            let img = random_image(w, h, Channels::Rgb, mix_seed(42, seed));
            let mut rng = item_rng(7, seed);
            let (out, record) = unprop(img.clone(), &params, &mut rng).unwrap();
            assert!(record.applied);
            let partition = record.partition.as_ref().unwrap();
            let permutation = record.permutation.as_ref().unwrap();
            let want = mosaic_reference(&img, partition, permutation);
            assert_eq!(out, want, "{w}x{h} seed {seed}");
        }
    }
}

#[test]
fn grayscale_mosaics_match_the_reference() {
    let params = UnpropParams {
        apply_prob: 1.0,
        target_rects: 9,
        ..UnpropParams::default()
    };
    for seed in 0..10u64 {
        let img = random_image(25, 19, Channels::Gray, mix_seed(5, seed));
        let mut rng = item_rng(13, seed);
        let (out, record) = unprop(img.clone(), &params, &mut rng).unwrap();
        let want = mosaic_reference(
            &img,
            record.partition.as_ref().unwrap(),
            record.permutation.as_ref().unwrap(),
        );
        assert_eq!(out, want, "seed {seed}");
    }
}

#[test]
fn replaying_a_record_reproduces_the_output() {
    let params = UnpropParams {
        apply_prob: 1.0,
        ..UnpropParams::default()
    };
    for seed in 0..10u64 {
        let img = random_image(30, 22, Channels::Rgb, seed);
        let mut rng = item_rng(99, seed);
        let (out, record) = unprop(img.clone(), &params, &mut rng).unwrap();
        let replayed = apply_mosaic(
            &img,
            record.partition.as_ref().unwrap(),
            record.permutation.as_ref().unwrap(),
        )
        .unwrap();
        assert_eq!(out, replayed, "seed {seed}");
    }
}
