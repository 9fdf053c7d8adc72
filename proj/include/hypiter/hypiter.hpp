#pragma once

#include "bloch.hpp"
#include "commands.hpp"
#include "constructions.hpp"
#include "core.hpp"
#include "domain.hpp"
#include "ifs.hpp"
#include "io.hpp"
#include "maps.hpp"
#include "parallel.hpp"
#include "stretch.hpp"
