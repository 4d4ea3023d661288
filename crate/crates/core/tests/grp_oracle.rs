mod common;

use cgrp::euler::{GasParams, PrimState};
use cgrp::grp::SideSlopes;
use cgrp::riemann::WaveKind;
use common::{compare_all, compare_with_fd, random_problems, LinearJump};

fn sod_like() -> LinearJump {
    LinearJump {
        left: PrimState::new(1.0, 0.75, 1.0),
        right: PrimState::new(0.4, 0.75, 0.5),
        slopes_l: SideSlopes::new(0.3, -0.2, 0.5),
        slopes_r: SideSlopes::new(-0.2, 0.4, 0.3),
    }
}

#[test]
fn sod_like_shock_and_rarefaction() {
    let g = GasParams::air();
    let c = compare_with_fd(&sod_like(), None, &g).unwrap();
    assert_eq!(c.waves, (WaveKind::Rarefaction, WaveKind::Shock));
    assert!(c.worst() <= 1.0, "{c:?}");
}

#[test]
fn colliding_streams_give_two_shocks() {
    let g = GasParams::air();
    let data = LinearJump {
        left: PrimState::new(1.0, 0.9, 1.0),
        right: PrimState::new(1.2, 0.5, 1.1),
        slopes_l: SideSlopes::new(-0.2, 0.3, 0.1),
        slopes_r: SideSlopes::new(0.4, -0.1, -0.3),
    };
    let c = compare_with_fd(&data, None, &g).unwrap();
    assert_eq!(c.waves, (WaveKind::Shock, WaveKind::Shock));
    assert!(c.worst() <= 1.0, "{c:?}");
}

#[test]
fn outtake_with_growing_rate() {
    let g = GasParams::air();
    let data = LinearJump {
        left: PrimState::new(1.0, 0.6, 1.0),
        right: PrimState::new(0.8, 0.55, 1.2),
        slopes_l: SideSlopes::new(0.2, -0.3, 0.4),
        slopes_r: SideSlopes::new(-0.3, 0.2, 0.1),
    };
    let c = compare_with_fd(&data, Some((0.2, 1.5)), &g).unwrap();
    assert!(c.coupled);
    assert!(c.worst() <= 1.0, "{c:?}");
}

#[test]
fn random_problems_agree_with_finite_differences() {
    let g = GasParams::air();
    let probs = random_problems(11, 16);
    let res = compare_all(&probs, &g);
    let solved: Vec<_> = res.iter().flatten().collect();
    assert!(solved.len() >= 12, "only {} of 16 solved", solved.len());
    for c in solved {
        assert!(c.worst() <= 1.0, "{c:?}");
    }
}
