//! Boundary closure blocks of the coarse-to-fine operators (left edge).
//! Rows are fine points, columns coarse points; the right edge is the mirror image.

pub const C2F_4: [[f64; 5]; 7] = [
    [
        1.13160844373005887e+00,
        -3.70402713383112980e-01,
        3.50541640561058687e-01,
        -1.16308915893015979e-01,
        4.56154498501117750e-03,
    ],
    [
        4.21635318145477500e-01,
        6.55643968601993699e-01,
        -9.67864577488604105e-02,
        4.00997371098325006e-02,
        -2.05925661084419565e-02,
    ],
    [
        -3.82292602075136739e-02,
        1.09958410047422639e+00,
        -8.37736931532647722e-02,
        2.17121257139135104e-02,
        7.06727172640309043e-04,
    ],
    [
        -1.61525996825968965e-01,
        8.21573377411075501e-01,
        3.48607063156275598e-01,
        -1.58302712419019498e-02,
        7.17582750052103702e-03,
    ],
    [
        -7.66655772446151740e-02,
        1.89756904047351571e-01,
        8.65729874014790068e-01,
        5.93184880682828819e-03,
        1.52469503756467728e-02,
    ],
    [
        3.90243664835721454e-02,
        -2.44798094209405487e-01,
        8.71885973576147499e-01,
        3.34524869541637293e-01,
        -6.37115391950549004e-04,
    ],
    [
        2.60746424152432654e-02,
        1.49295269633222989e-02,
        -1.69455101162237221e-01,
        1.18982305177353842e+00,
        -6.13721199898655811e-02,
    ],
];

pub const C2F_6: [[f64; 9]; 13] = [
    [
        1.13134028430486500e+00,
        -3.93677357792182048e-01,
        2.54233042711547008e-01,
        2.88952542579758442e-01,
        -3.78993244243361116e-01,
        4.49697844404972624e-03,
        1.47144016756712154e-01,
        -5.69477309338687621e-02,
        3.45146817247840576e-03,
    ],
    [
        3.67068563600061792e-01,
        7.63206806648189184e-01,
        -1.06832172426043814e-01,
        -8.75270146163396878e-02,
        1.30693187838873209e-01,
        -6.29728579133863597e-02,
        -4.77505411526656931e-02,
        6.12788569901620006e-02,
        -1.71648289688469680e-02,
    ],
    [
        -2.92610095955754546e-02,
        1.04319455610316125e+00,
        9.26099465880718675e-02,
        -2.11144276990847424e-01,
        7.53632512289549861e-02,
        6.65507698613760079e-02,
        -1.73156553607057909e-02,
        -3.46861143102432379e-02,
        1.46885324758103536e-02,
    ],
    [
        -1.80118738097526959e-01,
        9.22832961112970418e-01,
        2.32782839803614916e-01,
        -9.62444899085551642e-03,
        -3.31093517609661880e-02,
        1.22720785429680568e-01,
        -2.61718695104800891e-02,
        -5.08368271021956142e-02,
        2.15246491157589648e-02,
    ],
    [
        -9.21430629497274611e-02,
        3.49400836273855875e-01,
        4.84659150772144720e-01,
        3.84138948247719603e-01,
        -1.62081996169201936e-01,
        1.76870347080770318e-02,
        5.07423296730268591e-02,
        -4.35287749841174465e-02,
        1.11255344282191193e-02,
    ],
    [
        -5.71963619995538575e-03,
        -3.03966636363507819e-02,
        4.77488271901895578e-01,
        6.70989183558046598e-01,
        -9.32631501207275421e-02,
        -7.38334857407463990e-02,
        8.23431937998307661e-02,
        -3.14751440420177608e-02,
        3.86743048002606560e-03,
    ],
    [
        4.90636890338388282e-02,
        -1.83750919716561267e-01,
        2.72193339716978067e-01,
        7.58510013485181211e-01,
        2.01387851336012058e-01,
        -1.38849562540101973e-01,
        2.52073700980236411e-02,
        2.86193620976507093e-02,
        -1.23811435110203899e-02,
    ],
    [
        5.47928766213436058e-02,
        -1.41793229451093489e-01,
        -7.82323834990143567e-05,
        6.46102737235898061e-01,
        5.24694018305292498e-01,
        -7.60396774181772567e-02,
        -6.14416911084079073e-02,
        7.63916425585819542e-02,
        -2.26284443599404361e-02,
    ],
    [
        2.58856583379318272e-02,
        -1.33470081925970846e-02,
        -1.85641838466234665e-01,
        3.83769272330087785e-01,
        6.90622782827549742e-01,
        1.57674497159387694e-01,
        -1.14336596168372620e-01,
        7.45070293400819927e-02,
        -1.91337971678348095e-02,
    ],
    [
        -9.20609351403153808e-03,
        7.80195004459042496e-02,
        -1.75769967149336570e-01,
        6.98587528451884293e-02,
        5.70653002490618899e-01,
        5.24766126416977841e-01,
        -6.58933063775753169e-02,
        7.71450720274527782e-03,
        -1.42522360491267874e-04,
    ],
    [
        -2.39990368173580715e-02,
        5.75529102417719762e-02,
        2.00778127318043259e-02,
        -1.68081872319176595e-01,
        1.87464800042547064e-01,
        8.60526349589317840e-01,
        1.36645599000281365e-01,
        -9.56650388871904955e-02,
        2.54784764180010503e-02,
    ],
    [
        -9.69463539672744956e-03,
        -3.87850275717463999e-02,
        2.03841582419054812e-01,
        -1.92328335907554521e-01,
        -1.97108189639092379e-01,
        8.33733214883221829e-01,
        5.08044486089652580e-01,
        -1.41211397073117806e-01,
        3.35083021963103467e-02,
    ],
    [
        8.84672347428440420e-03,
        -1.04634287439725471e-03,
        -8.41922536051950277e-02,
        1.27493106963216446e-01,
        8.08188141371360413e-03,
        -9.71775259466651775e-02,
        1.00525896688582539e+00,
        5.29257175550789105e-02,
        -2.01902738658640279e-02,
    ],
];
