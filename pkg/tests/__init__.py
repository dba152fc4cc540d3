# Test package for the sampling benchmarks
