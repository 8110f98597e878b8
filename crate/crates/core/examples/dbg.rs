use fockforge_core::braid_rep::*;
use fockforge_core::tensor_core::*;
fn c(re: f64, im: f64) -> C64 { C64::new(re, im) }
fn q_flip(k: usize, q: C64) -> CMatrix {
    let mut t = CMatrix::zeros(k*k, k*k);
    for a in 0..k { for b in 0..k { t.set(b*k+a, a*k+b, q); } }
    t
}
fn main() {
    let d = DeformationOperator::new(2, q_flip(2, c(0.5,0.0)), 1e-8).unwrap();
    let id = CMatrix::identity(8);
    let f1 = range_basis(&id.add(&d.t_i(3,1).unwrap()), 1e-9).frame;
    let f2 = range_basis(&id.add(&d.t_i(3,2).unwrap()), 1e-9).frame;
    println!("dims {} {}", f1.cols(), f2.cols());
    let p1 = f1.mul(&f1.adjoint());
    let p2 = f2.mul(&f2.adjoint());
    println!("p1 vs I {:e}", p1.sub(&id).op_norm());
    println!("proj res p1 {:e}", p1.mul(&p1).sub(&p1).op_norm());
    let sum = p1.add(&p2);
    let (vals,_) = eigh(&sum);
    println!("eig sum {:?}", &vals[..3]);
    let pinv = hermitian_pinv(&sum, 1e-9);
    println!("pinv*sum - I {:e}", pinv.mul(&sum).sub(&id).op_norm());
    let ad = p1.mul(&pinv).mul(&p2).scale(c(2.0,0.0));
    println!("ad vs I {:e}", ad.sub(&id).op_norm());
    let stacked = CMatrix::vstack(&[&id.sub(&p1), &id.sub(&p2)]);
    let ker = kernel_basis(&stacked, 1e-9);
    println!("kernel dim {}", ker.dim());
}
