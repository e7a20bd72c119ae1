use cqiqa::imgcore::{channel, load_image, to_luma, RasterImage};
use proptest::prelude::*;

fn raster() -> impl Strategy<Value = RasterImage> {
    (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<u8>(), w * h * 3)
            .prop_map(move |d| RasterImage::new(w, h, d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn png_round_trip_is_lossless(img in raster()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        img.save_png(&path).unwrap();
        prop_assert_eq!(load_image(&path).unwrap(), img);
    }

    #[test]
    fn luma_stays_in_sample_range(img in raster()) {
        let l = to_luma(&img);
        prop_assert!(l.min() >= 0.0 && l.max() <= 255.0);
    }

    #[test]
    fn gray_pixels_have_their_own_luma(v in any::<u8>(), w in 1usize..9, h in 1usize..9) {
        let img = RasterImage::filled(w, h, [v, v, v]).unwrap();
        prop_assert!(to_luma(&img).data().iter().all(|&y| (y - v as f64).abs() < 1e-9));
    }
}

#[test]
fn grayscale_png_expands_to_three_channels() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.png");
    image::GrayImage::from_fn(5, 4, |x, y| image::Luma([(x * 40 + y) as u8]))
        .save(&path)
        .unwrap();
    let img = load_image(&path).unwrap();
    assert_eq!(img.dimensions(), (5, 4));
    assert_eq!(img.pixel(3, 2), [122, 122, 122]);
    assert_eq!(channel(&img, 0).unwrap(), channel(&img, 2).unwrap());
    assert!(channel(&img, 3).is_err());
}

#[test]
fn bmp_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.BMP");
    let img = RasterImage::from_fn(7, 3, |x, y| [x as u8 * 30, y as u8 * 70, 9]).unwrap();
    img.save_bmp(&path).unwrap();
    assert_eq!(load_image(&path).unwrap(), img);
}

#[test]
fn undecodable_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.png");
    std::fs::write(&path, b"not an image").unwrap();
    assert!(load_image(&path).is_err());
    assert!(load_image(dir.path().join("missing.png")).is_err());
}
