//! Directed-rounded interval arithmetic in a nutshell.

use boundstate::interval::Interval;

fn main() {
    let a = Interval::new(1.0, 2.0);
    let b = Interval::new(3.0, 4.0);
    println!("[1,2] + [3,4]      = [{}, {}]", (a + b).lo(), (a + b).hi());
    println!("[1,2] * [3,4]      = [{}, {}]", (a * b).lo(), (a * b).hi());

    // outward rounding: 1/3 is not a float, but the quotient encloses it
    let third = Interval::ONE.div(&Interval::point(3.0)).unwrap();
    println!(
        "1/3 in [{:.17}, {:.17}], width {:e}",
        third.lo(),
        third.hi(),
        third.width()
    );
    assert!(third.lo() < third.hi());

    // even powers collapse sign: [-2, 1]^2 = [0, 4]
    let sq = Interval::new(-2.0, 1.0).pow_int(2).unwrap();
    println!("[-2,1]^2           = [{}, {}]", sq.lo(), sq.hi());

    // sqrt(2) as a thin rigorous enclosure
    let s2 = Interval::sqrt2();
    println!("sqrt2 enclosure    = [{:.17}, {:.17}]", s2.lo(), s2.hi());
    assert!(s2.lo() * s2.lo() <= 2.0 && 2.0 <= s2.hi() * s2.hi());

    // comparisons are certain only when the intervals do not overlap
    println!(
        "[1,2] < [3,4]: {}   [1,3.5] < [3,4]: {}",
        a.strictly_lt(&b),
        Interval::new(1.0, 3.5).strictly_lt(&b)
    );
}
