#pragma once

// Umbrella header.
#include "jeffreys/dataset.hpp"
#include "jeffreys/enumerate.hpp"
#include "jeffreys/error.hpp"
#include "jeffreys/glm.hpp"
#include "jeffreys/infer.hpp"
#include "jeffreys/link.hpp"
#include "jeffreys/mle.hpp"
#include "jeffreys/mpl.hpp"
#include "jeffreys/normal.hpp"
#include "jeffreys/path.hpp"
#include "jeffreys/separation.hpp"
#include "jeffreys/simplex.hpp"
