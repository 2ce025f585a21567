#![allow(dead_code)]

use std::f64::consts::TAU;

use hhscaling::series::TimeSeries;
use hhscaling::sim::path_rng;
use rand_distr::{Distribution, StandardNormal};

pub fn white_noise(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = path_rng(seed, 1_000_003);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn tone(len: usize, period: f64, phase: f64) -> Vec<f64> {
    (0..len).map(|t| (TAU * t as f64 / period + phase).cos()).collect()
}

pub fn series(values: Vec<f64>) -> TimeSeries {
    TimeSeries::from_values(values).unwrap()
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}
