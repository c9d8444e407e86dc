#pragma once

namespace zkmcp {

// Selects the serial reference kernel or its OpenMP counterpart. Without
// OpenMP support both policies run the serial code.
enum class Exec { kSerial, kParallel };

bool openmp_enabled();
int max_threads();

}  // namespace zkmcp
