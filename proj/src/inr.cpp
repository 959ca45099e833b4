#include "dynrad/inr.hpp"

// Explicit instantiations for the two supported training precisions, so the
// template bodies are compiled (and type-checked) once here.
namespace dynrad::inr {

template struct CoordinateNetwork<double>;
template struct CoordinateNetwork<float>;
template struct NetGrads<double>;
template struct NetGrads<float>;
template struct SparseTableGrad<double>;
template struct SparseTableGrad<float>;
template struct AdamState<double>;
template struct AdamState<float>;

template void encode_batch<double>(const CoordinateNetwork<double>&, const double*, size_t,
                                   double*);
template void encode_batch<float>(const CoordinateNetwork<float>&, const double*, size_t,
                                  float*);
template void encode_backward<double>(const CoordinateNetwork<double>&, const double*, size_t,
                                      const double*, SparseTableGrad<double>&);
template void encode_backward<float>(const CoordinateNetwork<float>&, const double*, size_t,
                                     const float*, SparseTableGrad<float>&);
template void mlp_forward<double>(const CoordinateNetwork<double>&, ForwardCache<double>&);
template void mlp_forward<float>(const CoordinateNetwork<float>&, ForwardCache<float>&);
template void forward<double>(const CoordinateNetwork<double>&, const double*, size_t,
                              ForwardCache<double>&);
template void forward<float>(const CoordinateNetwork<float>&, const double*, size_t,
                             ForwardCache<float>&);
template void backward<double>(const CoordinateNetwork<double>&, const ForwardCache<double>&,
                               const double*, const double*, MlpParams<double>&,
                               SparseTableGrad<double>&, std::vector<double>&);
template void backward<float>(const CoordinateNetwork<float>&, const ForwardCache<float>&,
                              const double*, const float*, MlpParams<float>&,
                              SparseTableGrad<float>&, std::vector<float>&);
template void adam_step<double>(CoordinateNetwork<double>&, const NetGrads<double>&,
                                AdamState<double>&, double, const TouchedSet*);
template void adam_step<float>(CoordinateNetwork<float>&, const NetGrads<float>&,
                               AdamState<float>&, double, const TouchedSet*);
template void init_parameters<double>(CoordinateNetwork<double>&, uint64_t,
                                      const std::string&);
template void init_parameters<float>(CoordinateNetwork<float>&, uint64_t, const std::string&);

}  // namespace dynrad::inr
