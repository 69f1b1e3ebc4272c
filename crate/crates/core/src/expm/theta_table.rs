// @generated by tools/theta_oracle.py --tol-log2 53; do not edit.

/// `THETA_DOUBLE[m - 1]` is theta_m at tolerance 2^-53.
pub(crate) const THETA_DOUBLE: [f64; 55] = [
    2.2204460492503127522e-16,
    2.5809568029717671618e-8,
    1.3863478661191213402e-5,
    3.3971688399769619199e-4,
    2.4008763578872740594e-3,
    9.0656564075951024406e-3,
    2.3844555325002736261e-2,
    4.9912288711153226741e-2,
    8.9577602032233426811e-2,
    1.4418297616143778961e-1,
    2.1423580684517107105e-1,
    2.9961589138115804605e-1,
    3.997775336316795129e-1,
    5.1391469361242938094e-1,
    6.4108352330411986253e-1,
    7.8028742566265743272e-1,
    9.3053284607865679743e-1,
    1.0908637192900362053,
    1.2603810606426387658,
    1.4382525968043368919,
    1.6237159502358214562,
    1.8160778162150856285,
    2.0147107809446161695,
    2.219048869365089756,
    2.4285825244428264339,
    2.6428534574594353225,
    2.861449633934264019,
    3.0840005449891619724,
    3.3101728398902706679,
    3.5396663487436892682,
    3.7722104956817508842,
    4.0075610861180400713,
    4.2454974425796961907,
    4.4858198594473684474,
    4.728347345793539314,
    4.9729156261919817376,
    5.2193753710840582978,
    5.4675906305245443398,
    5.7174374475720127671,
    5.968802630041848832,
    6.2215826616898912348,
    6.4756827360799843682,
    6.7310158983810242176,
    6.9875022821306300458,
    7.2450684295979512513,
    7.5036466857888638694,
    7.7631746573779871422,
    8.0235947289399796392,
    8.2848536298039166262,
    8.5469020456849332536,
    8.8096942699713221476,
    9.0731878901761445545,
    9.3373435056120140477,
    9.6021244728265573166,
    9.8674966757534012685,
];
