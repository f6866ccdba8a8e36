fn main(){ for x in [-150.5f64,-2.6,-7.3,-20.5,-60.5]{ println!("{x} {} {} {}", tfdiff::special::rgamma(x), tfdiff::special::gamma(x), tfdiff::special::ln_gamma(x)); } }
