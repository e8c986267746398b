use std::ffi::{CStr, CString};
use std::ptr;

use dilemma_ffi::*;

fn last_error() -> String {
    let p = dilemma_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    dilemma_string_free(p);
    s
}

#[test]
fn pd_check_and_game_queries() {
    unsafe {
        let mut valid = false;
        assert_eq!(dilemma_check_pd(-1000.0, -2000.0, -3000.0, -4000.0, &mut valid), DilemmaStatus::Ok);
        assert!(valid);
        assert_eq!(dilemma_check_pd(3.0, 5.0, 1.0, 0.0, &mut valid), DilemmaStatus::Ok);
        assert!(!valid);
        assert_eq!(dilemma_check_pd(f64::NAN, 5.0, 1.0, 0.0, &mut valid), DilemmaStatus::InvalidArgument);

        let mut game = ptr::null_mut();
        assert_eq!(dilemma_game_new_pd(-1000.0, -2000.0, -3000.0, -4000.0, &mut game), DilemmaStatus::Ok);

        let mut cells = [0.0; 4];
        assert_eq!(dilemma_game_newcomb_view(game, DilemmaPlayer::Row, cells.as_mut_ptr()), DilemmaStatus::Ok);
        assert_eq!(cells, [-2000.0, -1000.0, -4000.0, -3000.0]);

        let mut eu = 0.0;
        assert_eq!(
            dilemma_expected_utility(game, DilemmaPlayer::Row, DilemmaAction::Repair, 0.75, &mut eu),
            DilemmaStatus::Ok
        );
        assert_eq!(eu, 0.75 * -2000.0 + 0.25 * -4000.0);

        let (mut kind, mut value, mut exact) = (DilemmaThresholdKind::NoCrossing, 0.0, ptr::null_mut());
        assert_eq!(
            dilemma_eu_threshold(game, DilemmaPlayer::Row, &mut kind, &mut value, &mut exact),
            DilemmaStatus::Ok
        );
        assert_eq!(kind, DilemmaThresholdKind::Crossing);
        assert_eq!(value, 0.75);
        assert_eq!(take_string(exact), "3/4");

        let mut a = 99;
        assert_eq!(dilemma_dominant_action(game, DilemmaPlayer::Col, &mut a), DilemmaStatus::Ok);
        assert_eq!(a, DilemmaAction::NoRepair as i32);
        dilemma_game_free(game);
    }
}

#[test]
fn asymmetric_game_from_tables_and_text() {
    unsafe {
        let row = [-2000.0, -4000.0, -1000.0, -3000.0];
        let col = [-2000.0, -1000.0, -1_000_000.0, -3000.0];
        let mut game = ptr::null_mut();
        assert_eq!(dilemma_game_new(row.as_ptr(), col.as_ptr(), &mut game), DilemmaStatus::Ok);
        let (mut kind, mut value) = (DilemmaThresholdKind::NoCrossing, 0.0);
        assert_eq!(
            dilemma_eu_threshold(game, DilemmaPlayer::Col, &mut kind, &mut value, ptr::null_mut()),
            DilemmaStatus::Ok
        );
        assert_eq!(value, 0.999);
        dilemma_game_free(game);

        let text = CString::new(include_str!("../../../games/table2.game")).unwrap();
        let mut parsed = ptr::null_mut();
        assert_eq!(dilemma_game_parse(text.as_ptr(), &mut parsed), DilemmaStatus::Ok);
        let mut cells = [0.0; 4];
        dilemma_game_newcomb_view(parsed, DilemmaPlayer::Col, cells.as_mut_ptr());
        assert_eq!(cells, [-2000.0, -1000.0, -1_000_000.0, -3000.0]);
        dilemma_game_free(parsed);

        let bad = CString::new("T = 1\nR = 2\n").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(dilemma_game_parse(bad.as_ptr(), &mut g), DilemmaStatus::Parse);
        assert!(g.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn null_and_range_errors() {
    unsafe {
        assert_eq!(dilemma_game_new_pd(4.0, 3.0, 2.0, 1.0, ptr::null_mut()), DilemmaStatus::NullPointer);
        assert!(last_error().contains("out_game"));
        let mut x = 0.0;
        assert_eq!(
            dilemma_expected_utility(ptr::null(), DilemmaPlayer::Row, DilemmaAction::Repair, 0.5, &mut x),
            DilemmaStatus::NullPointer
        );
        let mut game = ptr::null_mut();
        dilemma_game_new_pd(4.0, 3.0, 2.0, 1.0, &mut game);
        assert_eq!(
            dilemma_expected_utility(game, DilemmaPlayer::Row, DilemmaAction::Repair, 1.5, &mut x),
            DilemmaStatus::InvalidArgument
        );
        dilemma_game_free(game);
        assert_eq!(dilemma_sweep_len(ptr::null()), 0);
        dilemma_game_free(ptr::null_mut());
        dilemma_string_free(ptr::null_mut());
    }
}

#[test]
fn sweep_round_trip() {
    unsafe {
        let name = CString::new("fig1b").unwrap();
        let mut cfg = ptr::null_mut();
        assert_eq!(dilemma_config_from_preset(name.as_ptr(), &mut cfg), DilemmaStatus::Ok);
        assert_eq!(dilemma_config_set_steps(cfg, 500), DilemmaStatus::Ok);
        assert_eq!(dilemma_config_set_runs(cfg, 3), DilemmaStatus::Ok);
        assert_eq!(dilemma_config_set_seed(cfg, 11), DilemmaStatus::Ok);
        assert_eq!(dilemma_config_set_threads(cfg, 2), DilemmaStatus::Ok);
        assert_eq!(dilemma_config_set_grid(cfg, 0.0, 1.0, 0.25), DilemmaStatus::Ok);
        assert_eq!(dilemma_config_set_grid(cfg, 0.0, 1.0, 0.0), DilemmaStatus::Config);
        assert_eq!(dilemma_config_set_hyperparams(cfg, 0.1, 0.9, 2.0), DilemmaStatus::InvalidArgument);

        let mut sweep = ptr::null_mut();
        assert_eq!(dilemma_run_sweep(cfg, &mut sweep), DilemmaStatus::Ok);
        let n = dilemma_sweep_len(sweep);
        assert_eq!(n % 5, 0);
        assert!(n > 0);

        let mut point = std::mem::zeroed::<DilemmaSweepPoint>();
        let mut agent = ptr::null_mut();
        for i in 0..n {
            assert_eq!(dilemma_sweep_point(sweep, i, &mut point), DilemmaStatus::Ok);
            assert_eq!(dilemma_sweep_agent(sweep, i, &mut agent), DilemmaStatus::Ok);
            let label = take_string(agent);
            assert_eq!(point.runs, 3);
            assert!((0.0..=1.0).contains(&point.repair_freq));
            if label == "always-repair" {
                assert_eq!(point.repair_freq, 1.0);
            }
        }
        assert_eq!(dilemma_sweep_point(sweep, n, &mut point), DilemmaStatus::InvalidArgument);

        let mut csv = ptr::null_mut();
        assert_eq!(dilemma_sweep_to_csv(sweep, &mut csv), DilemmaStatus::Ok);
        let csv = take_string(csv);
        let parsed = dilemma::csv_io::parse_csv(&csv).unwrap();
        assert_eq!(parsed.points.len(), n);
        assert_eq!(parsed.seed, 11);

        let plot = CString::new("action").unwrap();
        let mut svg = ptr::null_mut();
        assert_eq!(dilemma_sweep_to_svg(sweep, plot.as_ptr(), &mut svg), DilemmaStatus::Ok);
        assert!(take_string(svg).starts_with("<svg"));
        let bad = CString::new("pie").unwrap();
        assert_eq!(dilemma_sweep_to_svg(sweep, bad.as_ptr(), &mut svg), DilemmaStatus::Config);

        dilemma_sweep_free(sweep);
        dilemma_config_free(cfg);
    }
}

#[test]
fn custom_configs() {
    unsafe {
        let mut game = ptr::null_mut();
        dilemma_game_new_pd(-1000.0, -2000.0, -3000.0, -4000.0, &mut game);
        let agents = CString::new("eu, never-repair").unwrap();
        let modes = CString::new("individual,sum").unwrap();
        let mut cfg = ptr::null_mut();
        assert_eq!(dilemma_config_pd(game, agents.as_ptr(), modes.as_ptr(), &mut cfg), DilemmaStatus::Ok);
        dilemma_config_set_steps(cfg, 50);
        dilemma_config_set_runs(cfg, 2);
        let mut sweep = ptr::null_mut();
        assert_eq!(dilemma_run_sweep(cfg, &mut sweep), DilemmaStatus::Ok);
        assert_eq!(dilemma_sweep_len(sweep), 4 * 21);
        dilemma_sweep_free(sweep);
        dilemma_config_free(cfg);

        let nobody = CString::new("sarsa,nobody").unwrap();
        assert_eq!(
            dilemma_config_newcomb(game, DilemmaPlayer::Row, nobody.as_ptr(), &mut cfg),
            DilemmaStatus::Config
        );
        let ok = CString::new("sarsa").unwrap();
        assert_eq!(dilemma_config_newcomb(game, DilemmaPlayer::Row, ok.as_ptr(), &mut cfg), DilemmaStatus::Ok);
        dilemma_config_set_steps(cfg, 0);
        assert_ne!(dilemma_run_sweep(cfg, &mut sweep), DilemmaStatus::Ok);
        dilemma_config_free(cfg);
        dilemma_game_free(game);
    }
}
