//! Acceptance suite. Each test prints one `PASS`/`FAIL` line to stderr,
//! bypassing libtest output capture, so the full run shows every verdict.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rulelab_core::dataset::{build, build_with_workers, verify, Level, SplitCounts};
use rulelab_core::engine::{step, step_packed};
use rulelab_core::eval::{evaluate, EvalOptions, PerRule};
use rulelab_core::inference::{infer_from_sequences, RuleConstraints};
use rulelab_core::io::{
    decode_pbm, encode_pbm, format_rules, parse_rules, CadsFile, FormatError, PbmMode, PredictionFile,
};
use rulelab_core::predictors::build_constructed_net;
use rulelab_core::rules::sample_rules;
use rulelab_core::{infer_rule, simulate, Boundary, Dataset, DatasetSpec, Grid, PredictorKind, Rule, Split};

fn verdict(criterion: &str, result: Result<String, String>) {
    let line = match &result {
        Ok(detail) => format!("[acceptance] PASS {criterion}: {detail}\n"),
        Err(detail) => format!("[acceptance] FAIL {criterion}: {detail}\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(detail) = result {
        panic!("{criterion}: {detail}");
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:.1?}, limit {limit:?}"))
}

#[test]
fn engine_packed_matches_reference() {
    let start = Instant::now();
    let sizes = [(1, 1), (1, 7), (8, 8), (31, 33), (64, 64), (128, 128)];
    let mut rng = ChaCha8Rng::seed_from_u64(0xE6);
    let mut triples = 0;
    let mut bad_bits = 0usize;
    let mut failures = Vec::new();
    for radius in 1..=4u32 {
        let rules = sample_rules(16, radius, 100 + u64::from(radius)).unwrap();
        for rule in &rules.rules {
            for &(h, w) in &sizes {
                for boundary in [Boundary::Dead, Boundary::Toroidal] {
                    for _ in 0..3 {
                        let density = rng.gen_range(0.05..0.95);
                        let grid = Grid::random(h, w, density, rng.gen());
                        let fast = step_packed(rule, &grid, boundary);
                        let slow = step(rule, &grid, boundary);
                        let diff = fast
                            .cells()
                            .iter()
                            .zip(slow.cells())
                            .filter(|(a, b)| a != b)
                            .count();
                        if diff > 0 {
                            failures.push(format!("{} {h}x{w} {boundary}", rule.notation()));
                        }
                        bad_bits += diff;
                        triples += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let result = (|| {
        check(triples >= 1000, || format!("only {triples} triples"))?;
        check(bad_bits == 0, || {
            format!("{bad_bits} mismatched bits, first: {:?}", failures.first())
        })?;
        within(elapsed, Duration::from_secs(30))?;
        Ok(format!("{triples} triples, 0 mismatched bits, {elapsed:.2?}"))
    })();
    verdict("engine oracle equivalence", result);
}

#[test]
fn known_patterns_under_life() {
    let life = Rule::game_of_life();
    let result = (|| {
        let blinker = Grid::from_rows(&[".....", "..#..", "..#..", "..#..", "....."]);
        let once = step(&life, &blinker, Boundary::Dead);
        check(once != blinker, || "blinker is static".into())?;
        check(step(&life, &once, Boundary::Dead) == blinker, || {
            "blinker period is not 2".into()
        })?;

        let block = Grid::from_rows(&["....", ".##.", ".##.", "...."]);
        check(step(&life, &block, Boundary::Dead) == block, || {
            "block moved".into()
        })?;

        let mut glider = Grid::new(16, 16);
        for (r, c) in [(0, 1), (1, 2), (2, 0), (2, 1), (2, 2)] {
            glider.set(r, c, true);
        }
        let mut g = glider.clone();
        for t in 1..=16 {
            g = step(&life, &g, Boundary::Toroidal);
            if t % 4 == 0 {
                let shift = (t / 4) as isize;
                check(g == glider.shifted(shift, shift), || {
                    format!("glider off course at t={t}")
                })?;
            }
        }
        Ok("blinker period 2, block fixed, glider +1,+1 per 4 steps for 16 steps".to_string())
    })();
    verdict("known patterns (B3/S23)", result);
}

#[test]
fn constructed_net_equals_rule() {
    let start = Instant::now();
    let result = (|| {
        let small = sample_rules(20, 1, 2024).unwrap();
        let mut exhaustive = 0u64;
        for rule in &small.rules {
            let net = build_constructed_net(rule);
            for bits in 0u32..1 << 16 {
                let cells = (0..16).map(|i| ((bits >> i) & 1) as u8).collect();
                let grid = Grid::from_cells(4, 4, cells).unwrap();
                if net.forward(&grid) != step(rule, &grid, Boundary::Dead) {
                    return Err(format!("{} differs on 4x4 grid {bits:#06x}", rule.notation()));
                }
                exhaustive += 1;
            }
        }
        let mut random = 0u64;
        for radius in [2u32, 3, 4] {
            let rules = sample_rules(10, radius, 77 + u64::from(radius)).unwrap();
            for (i, rule) in rules.rules.iter().enumerate() {
                let net = build_constructed_net(rule);
                for s in 0..200u64 {
                    let grid = Grid::random(32, 32, 0.5, (radius as u64) << 32 | (i as u64) << 16 | s);
                    if net.forward(&grid) != step(rule, &grid, Boundary::Dead) {
                        return Err(format!("{} differs on random grid {s}", rule.notation()));
                    }
                    random += 1;
                }
            }
        }
        let elapsed = start.elapsed();
        within(elapsed, Duration::from_secs(60))?;
        Ok(format!(
            "{exhaustive} exhaustive 4x4 and {random} random 32x32 grids exact, {elapsed:.2?}"
        ))
    })();
    verdict("constructed conv net exactness", result);
}

fn saturated_constraints(rule: &Rule, seed: u64) -> RuleConstraints {
    let mut constraints = RuleConstraints::new(rule.radius(), Boundary::Dead).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let densities = [0.03, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.97];
    for _ in 0..40 {
        for &d in &densities {
            let g = Grid::random_with(32, 32, d, &mut rng);
            constraints.observe(&g, &step(rule, &g, Boundary::Dead)).unwrap();
        }
        if constraints.is_saturated() {
            break;
        }
    }
    constraints
}

#[test]
fn inference_recovers_rules() {
    let result = (|| {
        let mut reproduced = 0;
        let mut exact = 0;
        for radius in [1u32, 2] {
            let rules = sample_rules(50, radius, 500 + u64::from(radius)).unwrap();
            for (i, rule) in rules.rules.iter().enumerate() {
                let trajectories: Vec<_> = (0..20u64)
                    .map(|s| {
                        let seed = (u64::from(radius) << 40) | ((i as u64) << 20) | s;
                        simulate(rule, &Grid::random(32, 32, 0.5, seed), 12, Boundary::Dead)
                    })
                    .collect();
                let (inferred, _) = infer_from_sequences(
                    trajectories.iter().map(|t| t.states.as_slice()),
                    radius,
                    Boundary::Dead,
                )
                .map_err(|e| format!("false inconsistency for {}: {e}", rule.notation()))?;
                for t in &trajectories {
                    let again = simulate(&inferred, t.initial(), t.steps(), Boundary::Dead);
                    check(again.states == t.states, || {
                        format!(
                            "{} re-simulation diverges from {}",
                            inferred.notation(),
                            rule.notation()
                        )
                    })?;
                }
                reproduced += 1;

                let constraints = saturated_constraints(rule, 9000 + i as u64);
                check(constraints.is_saturated(), || {
                    format!("{} never saturated", rule.notation())
                })?;
                let (full, report) = infer_rule(&constraints).map_err(|e| e.to_string())?;
                check(report.is_fully_identified() && &full == rule, || {
                    format!(
                        "saturated inference gave {} for {}",
                        full.notation(),
                        rule.notation()
                    )
                })?;
                exact += 1;
            }
        }
        Ok(format!(
            "{reproduced} rules reproduced bit-for-bit, {exact} exact under saturation, 0 false inconsistencies"
        ))
    })();
    verdict("rule inference", result);
}

/// Default-spec datasets for every level, built once and shared.
fn datasets() -> &'static [Dataset] {
    static CELL: OnceLock<Vec<Dataset>> = OnceLock::new();
    CELL.get_or_init(|| {
        Level::ALL
            .iter()
            .map(|&level| build(&DatasetSpec::for_level(level), 11, 12).unwrap())
            .collect()
    })
}

fn split_bytes(dataset: &Dataset) -> Vec<Vec<u8>> {
    Split::ALL
        .iter()
        .map(|&s| CadsFile::from_split(dataset, s).encode().unwrap())
        .collect()
}

#[test]
fn dataset_integrity() {
    let result = (|| {
        let mut samples = 0;
        for d in datasets() {
            let report = verify(d);
            let level = d.spec.level;
            check(report.is_ok(), || format!("{level}: {report}"))?;
            if !level.tests_on_train_rules() {
                check(report.rules_disjoint == Some(true), || {
                    format!("{level}: rules overlap")
                })?;
            }
            samples += Split::ALL.iter().map(|&s| d.samples(s).len()).sum::<usize>();
        }

        let spec = DatasetSpec {
            train_rules: 60,
            test_rules: 12,
            ..DatasetSpec::for_level(Level::Level2)
        };
        let (one, _) = build_with_workers(&spec, 3, 4, 1).map_err(|e| e.to_string())?;
        let (eight, _) = build_with_workers(&spec, 3, 4, 8).map_err(|e| e.to_string())?;
        check(split_bytes(&one) == split_bytes(&eight), || {
            "1 vs 8 workers differ".into()
        })?;
        Ok(format!(
            "5 levels verified ({samples} samples, 0 mismatches), disjoint unseen rules, 1 vs 8 workers byte-identical"
        ))
    })();
    verdict("dataset integrity", result);
}

fn pbm_via_image_crate(bytes: &[u8]) -> Result<Grid, String> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Pnm)
        .map_err(|e| e.to_string())?
        .to_luma8();
    let (w, h) = img.dimensions();
    // PBM 1 is black, which decodes to luminance 0
    let cells = img.pixels().map(|p| u8::from(p.0[0] == 0)).collect();
    Grid::from_cells(h as usize, w as usize, cells).map_err(|e| e.to_string())
}

#[test]
fn format_round_trips() {
    let result = (|| {
        let spec = DatasetSpec {
            grid_height: 13,
            grid_width: 21,
            train_rules: 9,
            test_rules: 3,
            configs_per_rule: SplitCounts {
                train: 2,
                val: 1,
                test: 1,
            },
            ..DatasetSpec::for_level(Level::Level2)
        };
        let d = build(&spec, 5, 6).unwrap();
        for split in Split::ALL {
            let file = CadsFile::from_split(&d, split);
            let bytes = file.encode().map_err(|e| e.to_string())?;
            let back = CadsFile::decode(&bytes).map_err(|e| e.to_string())?;
            check(back == file, || format!("CADS {split} changed"))?;
            check(back.encode().unwrap() == bytes, || {
                "CADS re-encode differs".into()
            })?;
            let cut = CadsFile::decode(&bytes[..bytes.len() - 3]);
            check(matches!(cut, Err(FormatError::Length { .. })), || {
                format!("CADS truncation gave {cut:?}")
            })?;
            let mut bad = bytes.clone();
            bad[0] = b'X';
            let r = CadsFile::decode(&bad);
            check(matches!(r, Err(FormatError::Format { offset: 0, .. })), || {
                format!("bad magic gave {r:?}")
            })?;
            let mut bad = bytes.clone();
            bad[4] = 9;
            let r = CadsFile::decode(&bad);
            check(matches!(r, Err(FormatError::Format { offset: 4, .. })), || {
                format!("bad version gave {r:?}")
            })?;
        }

        let targets: Vec<Grid> = d.test.iter().map(|s| s.target.clone()).collect();
        let binary = PredictionFile::binary(13, 21, targets.clone());
        let bytes = binary.encode().map_err(|e| e.to_string())?;
        let back = PredictionFile::decode(&bytes).map_err(|e| e.to_string())?;
        check(back == binary, || "CAPR binary changed".into())?;
        let probs: Vec<Vec<f32>> = targets
            .iter()
            .map(|g| {
                g.cells()
                    .iter()
                    .map(|&c| if c == 1 { 0.75 } else { 0.125 })
                    .collect()
            })
            .collect();
        let prob_file = PredictionFile::probabilities(13, 21, probs);
        let pbytes = prob_file.encode().map_err(|e| e.to_string())?;
        let back = PredictionFile::decode(&pbytes).map_err(|e| e.to_string())?;
        check(back == prob_file && back.to_grids() == targets, || {
            "CAPR probabilities changed".into()
        })?;
        let cut = PredictionFile::decode(&pbytes[..pbytes.len() - 1]);
        check(matches!(cut, Err(FormatError::Length { .. })), || {
            format!("CAPR truncation gave {cut:?}")
        })?;
        let mut bad = pbytes.clone();
        bad[5] = 4;
        let r = PredictionFile::decode(&bad);
        check(matches!(r, Err(FormatError::Format { offset: 5, .. })), || {
            format!("bad CAPR mode gave {r:?}")
        })?;

        for set in [&d.train_rules, &d.test_rules] {
            let text = format_rules(set);
            let back = parse_rules(&text).map_err(|e| e.to_string())?;
            check(back.rules == set.rules && back.label == set.label, || {
                "rules text changed".into()
            })?;
        }
        let r = parse_rules("B3/S23 n=3\nB3/S2,3 n=4\n");
        check(matches!(r, Err(FormatError::Rule { line: 2, .. })), || {
            format!("bad rules line gave {r:?}")
        })?;

        let mut pbm_frames = 0;
        for g in d.train.iter().take(20).flat_map(|s| s.frames()) {
            for mode in [PbmMode::Binary, PbmMode::Ascii] {
                let bytes = encode_pbm(g, mode);
                let back = decode_pbm(&bytes).map_err(|e| e.to_string())?;
                check(&back == g, || "PBM self round trip failed".into())?;
                check(&pbm_via_image_crate(&bytes)? == g, || {
                    format!("image crate disagrees ({mode:?})")
                })?;
            }
            pbm_frames += 1;
        }
        Ok(format!(
            "CADS x3 splits, CAPR binary+float, rules text, {pbm_frames} PBM frames (P4+P1, independent reader); \
             truncation -> Length, corruption -> Format at the right offsets"
        ))
    })();
    verdict("format round trips", result);
}

#[test]
fn constant_baseline_in_band() {
    let d = &datasets()[0];
    let report = evaluate(
        &PerRule::new(PredictorKind::Oracle, &d.test_rules, d.spec.boundary, 0.5),
        &d.test,
        &d.test_rules,
        EvalOptions {
            baselines: true,
            error_maps: false,
        },
    )
    .unwrap();
    let constant = report.baselines["constant"].accuracy();
    let detail = format!(
        "constant-majority {:.4} (target live fraction {:.4}, copy-last {:.4}, flip-all {:.4})",
        constant,
        report.target_live_fraction,
        report.baselines["copy-last"].accuracy(),
        report.baselines["flip-all"].accuracy()
    );
    let result = if (0.41..=0.61).contains(&constant) {
        Ok(detail)
    } else {
        Err(format!("{detail} outside [0.41, 0.61]"))
    };
    verdict("baseline band (simple test split)", result);
}

#[test]
fn oracle_is_perfect_everywhere() {
    let result = (|| {
        let mut splits = 0;
        for d in datasets() {
            for split in Split::ALL {
                let rules = d.rules(split);
                let oracle = PerRule::new(PredictorKind::Oracle, rules, d.spec.boundary, 0.5);
                let report = evaluate(&oracle, d.samples(split), rules, EvalOptions::default())
                    .map_err(|e| e.to_string())?;
                check(
                    report.overall.correct == report.overall.total && report.overall.total > 0,
                    || {
                        format!(
                            "{} {split}: {}/{}",
                            d.spec.level, report.overall.correct, report.overall.total
                        )
                    },
                )?;
                splits += 1;
            }
        }
        Ok(format!("{splits} level/split pairs at exactly 100.00%"))
    })();
    verdict("oracle ceiling", result);
}
