// resonancekit.hpp: umbrella header.

#pragma once

#include "resonancekit/averaging.hpp"
#include "resonancekit/closed_form.hpp"
#include "resonancekit/fock.hpp"
#include "resonancekit/kam.hpp"
#include "resonancekit/methods.hpp"
#include "resonancekit/spectrum.hpp"
#include "resonancekit/sweep.hpp"
#include "resonancekit/transforms.hpp"
