use pairsec::dickman::{log2_rho, RhoTable};

#[test]
fn unit_interval_is_exactly_one() {
    let t = RhoTable::global();
    for i in 0..=100 {
        let u = i as f64 / 100.0;
        assert_eq!(t.rho(u), 1.0);
        assert_eq!(log2_rho(u).unwrap(), 0.0);
    }
}

#[test]
fn rho_two_is_one_minus_ln2() {
    let t = RhoTable::global();
    assert!((t.rho(2.0) - (1.0 - std::f64::consts::LN_2)).abs() < 1e-9);
}

/// u rho'(u) + rho(u - 1) = 0, checked relative to rho(u - 1).
#[test]
fn delay_equation_residual() {
    let t = RhoTable::global();
    let mut worst: f64 = 0.0;
    let mut u = 1.01;
    while u < 20.0 {
        let lhs = u * t.rho_prime(u) + t.rho(u - 1.0);
        worst = worst.max((lhs / t.rho(u - 1.0)).abs());
        u += 0.037;
    }
    assert!(worst <= 1e-6, "worst relative residual {worst:e}");
}

#[test]
fn deep_value_matches_published_probability() {
    let v = log2_rho(7.375).unwrap();
    assert!((v + 21.88).abs() < 0.1, "{v}");
}

/// de Bruijn's Lambda(x, y) / x = integral of rho(u - v) d(floor(y^v) / y^v),
/// the standard finite-x refinement of Psi(x, y) ~ x rho(u). With t = y^v the
/// measure is a unit jump at t = 1, jumps of 1/n at each integer n >= 2,
/// and the smooth part -floor(t)/t^2 dt (midpoint rule per unit interval).
fn lambda_fraction(x: usize, y: f64) -> f64 {
    let t = RhoTable::global();
    let (lx, ly) = ((x as f64).ln(), y.ln());
    let rho_at = |v: f64| t.rho(((lx - v) / ly).max(0.0));
    let mut sum = rho_at(0.0);
    for n in 1..x {
        let nf = n as f64;
        sum += rho_at((nf + 1.0).ln()) / (nf + 1.0);
        sum -= rho_at((nf + 0.5).ln()) * nf * (1.0 / nf - 1.0 / (nf + 1.0));
    }
    sum
}

/// Fraction of B-smooth integers in [2, n], B = n^(1/u), against Lambda.
/// Lambda tracks Psi closely once y >= exp((ln ln x)^(5/3)), about 166 here,
/// which covers u = 2 and 2.5; at u = 3 (y = 126) it must still beat rho.
#[test]
fn smooth_fraction_oracle() {
    let n = 2_000_000usize;
    let mut largest = vec![1u32; n + 1];
    for p in 2..=n {
        if largest[p] == 1 {
            let mut m = p;
            while m <= n {
                largest[m] = p as u32;
                m += p;
            }
        }
    }
    let t = RhoTable::global();
    for u in [2.0, 2.5, 3.0] {
        let b = (n as f64).powf(1.0 / u);
        let smooth = (2..=n).filter(|&m| (largest[m] as f64) <= b).count();
        let empirical = smooth as f64 / (n - 1) as f64;
        let expected = lambda_fraction(n, b);
        println!("u={u}: empirical {empirical:.4} rho {:.4} lambda {expected:.4}", t.rho(u));
        let rel = (empirical - expected).abs() / expected;
        let raw = (empirical - t.rho(u)).abs() / t.rho(u);
        assert!(rel < raw, "u={u}: Lambda no closer than rho");
        if b >= ((n as f64).ln().ln().powf(5.0 / 3.0)).exp() {
            assert!(rel < 0.10, "u={u}: empirical {empirical} expected {expected} rel {rel}");
        }
    }
}

#[test]
fn monotone_decreasing() {
    let t = RhoTable::global();
    let mut prev = 0.0;
    for i in 0..400 {
        let v = log2_rho(1.0 + i as f64 * 0.1).unwrap();
        assert!(v <= prev + 1e-12);
        prev = v;
    }
    assert!(t.u_max() >= 20.0);
}
