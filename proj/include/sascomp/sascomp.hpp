#ifndef SASCOMP_SASCOMP_HPP
#define SASCOMP_SASCOMP_HPP

#include "sascomp/types.hpp"
#include "sascomp/kernels.hpp"
#include "sascomp/frame.hpp"
#include "sascomp/spaces.hpp"
#include "sascomp/geoflow.hpp"
#include "sascomp/models.hpp"
#include "sascomp/riccati.hpp"
#include "sascomp/volume.hpp"
#include "sascomp/distops.hpp"
#include "sascomp/heat.hpp"
#include "sascomp/io.hpp"
#include "sascomp/acceptance.hpp"

#endif  // SASCOMP_SASCOMP_HPP
