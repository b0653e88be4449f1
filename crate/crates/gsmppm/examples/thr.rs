//! Scratch: threshold methodology check.

use gsmppm::adm::{build_adm, SearchBudget};
use gsmppm::channel::{FadingParams, PowerConfig};
use gsmppm::constellation::ModulationPattern;
use gsmppm::pexit::{pexit_threshold, DetectorLlr, PexitOptions};
use gsmppm::pldpc::{ar4ja_r12, improved_protograph};
use gsmppm::rng::Stream;

fn main() {
    let fading = FadingParams::new(0.3).unwrap();
    let patterns = [(5u8, 32u32), (6, 32), (7, 64), (8, 64)];
    let table3 = [-3.6942, -3.8542, -4.3475, -4.4732];
    let table4 = [-3.7918, -3.8892, -4.4693, -4.5256];

    for llr in [DetectorLlr::MaxLog, DetectorLlr::ExactMap] {
        println!("=== detector {llr:?} ===");
        for (idx, (l, _ms)) in patterns.iter().enumerate() {
            let pattern = ModulationPattern::new(4, 4, 2, *l, 2).unwrap();
            let adm = build_adm(&pattern, &SearchBudget::default()).unwrap();
            let power = PowerConfig::from_pattern(&pattern, 1.0).unwrap();
            let opts = PexitOptions { n_samples: 100_000, detector_llr: llr, ..Default::default() };
            let t0 = std::time::Instant::now();
            let a = pexit_threshold(
                &ar4ja_r12(),
                &adm.constellation,
                &fading,
                &power,
                &opts,
                Stream::root(77),
            )
            .unwrap();
            let i = pexit_threshold(
                &improved_protograph(),
                &adm.constellation,
                &fading,
                &power,
                &opts,
                Stream::root(77),
            )
            .unwrap();
            println!(
                "l={l}: AR4JA {:+.4} (ref {:+.4}, diff {:+.3}) | I-PLDPC {:+.4} (ref {:+.4}, diff {:+.3}) | gap {:+.4} | {:?}",
                a.threshold_db,
                table3[idx],
                a.threshold_db - table3[idx],
                i.threshold_db,
                table4[idx],
                i.threshold_db - table4[idx],
                a.threshold_db - i.threshold_db,
                t0.elapsed(),
            );
        }
    }
}
